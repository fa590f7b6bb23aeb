#pragma once

#include <string>
#include <vector>

#include "dioph/realnum.hpp"

namespace dioph {

struct VerifyEntry {
    std::string group;     // module or statement family
    std::string name;
    bool applies = true;   // hypothesis met
    bool ok = true;
    std::string detail;
};

struct VerifyReport {
    std::string alpha;
    long N = 0;
    long precision = 0;
    long depth = 0;
    std::vector<VerifyEntry> entries;
    bool pass() const;
    std::string to_json() const;
};

// Every applicable certified inequality at (alpha, N), with hypothesis flags.
VerifyReport verify_all(const Real& alpha, long N, long precision = 16, int threads = 1);

}  // namespace dioph
