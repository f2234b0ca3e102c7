#include <cstdio>
int main(int, char**){ std::puts("cli placeholder"); return 0; }
