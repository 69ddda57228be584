#include <cstdio>

int main(int, char**) {
  std::fprintf(stderr, "fdr: command-line front end not wired up yet\n");
  return 1;
}
