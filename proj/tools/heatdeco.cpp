#include "heatdeco/commands.hpp"

int main(int argc, char** argv) {
  return heatdeco::run_cli(argc, argv);
}
