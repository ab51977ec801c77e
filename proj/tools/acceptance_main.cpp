#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "shrinker/acceptance.hpp"
#include "shrinker/error.hpp"
#include "shrinker/parallel.hpp"

// Usage: shrinker_acceptance [id ...]; 16 aggregates 1..15.
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  try {
    bool all = true;
    shrinker::run_acceptance(ids, [&](const shrinker::CriterionResult& r) {
      std::printf("%s\n", shrinker::format_criterion(r).c_str());
      std::fflush(stdout);
      all = all && r.pass;
    });
    return all ? 0 : 1;
  } catch (const shrinker::Error& e) {
    std::fprintf(stderr, "%s: %s\n", shrinker::error_code_name(e.code()), e.what());
    return 2;
  }
}
