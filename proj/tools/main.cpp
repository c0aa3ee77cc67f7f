// Experiment runner; command wiring is added as modules land.
int main() { return 0; }
