// Command-line front end; see the runner header for modes and outputs.

#include <iostream>

int main() {
  std::cout << "vexlab (work in progress)\n";
  return 0;
}
