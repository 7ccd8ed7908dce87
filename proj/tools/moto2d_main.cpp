#include <iostream>

int main() {
  std::cout << "moto2d: CLI not wired up yet\n";
  return 0;
}
