// Acceptance suite: one PASS/FAIL line per property at the pinned
// dimensions. Exits nonzero if any property fails.

#include <cstdio>

#include "qregion/verify.hpp"

int main() {
  qregion::verify::Options opt;
  opt.threads = qregion::default_thread_count();
  int failed = 0;
  qregion::verify::run_all(opt, [&](const qregion::verify::Result& r) {
    std::printf("%s\n", qregion::verify::format_line(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%d/%zu properties passed\n", static_cast<int>(qregion::verify::criteria().size()) - failed,
              qregion::verify::criteria().size());
  return failed == 0 ? 0 : 1;
}
