#include "dioph/error.hpp"

namespace dioph {

const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Depth: return "depth";
        case ErrorKind::Precision: return "precision";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::DegenerateGamma: return "degenerate-gamma";
        case ErrorKind::Hypothesis: return "hypothesis";
        case ErrorKind::Resource: return "resource";
        case ErrorKind::Internal: return "internal";
    }
    return "unknown";
}

}  // namespace dioph
