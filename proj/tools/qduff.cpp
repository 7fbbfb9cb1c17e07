// placeholder; full CLI follows
int main() { return 0; }
