// Acceptance driver: one pass/fail line per criterion, exit = #failures.
#include <vhj/acceptance.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  vhj::acceptance::Options opt;
  opt.threads = 2;
  opt.log = &std::cout;
  std::vector<std::string> ids;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) {
      std::string id;
      if (!vhj::acceptance::resolve_suite(argv[i], id)) {
        std::cerr << "unknown suite: " << argv[i] << "\n";
        return 64;
      }
      if (id == "all") {
        ids = vhj::acceptance::suite_ids();
        break;
      }
      ids.push_back(id);
    }
  } else {
    ids = vhj::acceptance::suite_ids();
  }
  const auto results = vhj::acceptance::run_suites(ids, opt);
  int fails = 0;
  for (const auto& r : results) fails += r.pass ? 0 : 1;
  std::cout << (fails == 0 ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL") << " ("
            << results.size() - fails << "/" << results.size() << ")\n";
  return fails;
}
