#include <iostream>

#include "causality/acceptance.hpp"

int main(int argc, char** argv) {
  causality::AcceptanceOptions options;
  if (argc > 1) options.work_dir = argv[1];
  const auto results = causality::run_acceptance(options, std::cout);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size() ? 0 : 1;
}
