// Full acceptance gate: runs every release criterion at its pinned budget
// and prints one line per check.  Exit 0 only if nothing failed.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "rough/verify.hpp"

int main(int argc, char** argv) {
  rough::VerifyOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      opts.only = argv[++i];
    } else if (std::strcmp(argv[i], "--replica-scale") == 0 && i + 1 < argc) {
      opts.replica_scale = std::atof(argv[++i]);
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr,
                   "usage: %s [--only PREFIX] [--replica-scale X] [--seed N]\n",
                   argv[0]);
      return 2;
    }
  }

  const auto results = rough::run_acceptance(opts);
  int passed = 0, failed = 0, skipped = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-22s (%.1f s)  %s\n",
                rough::status_name(r.status).c_str(), r.id.c_str(), r.seconds,
                r.detail.c_str());
    switch (r.status) {
      case rough::CheckStatus::kPass: ++passed; break;
      case rough::CheckStatus::kFail: ++failed; break;
      case rough::CheckStatus::kSkip: ++skipped; break;
    }
  }
  std::printf("%d passed, %d failed, %d skipped\n", passed, failed, skipped);
  return rough::verify_exit_code(results);
}
