#include "bemorl/error.hpp"

namespace bemorl {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Stability: return "stability";
    case ErrorKind::Ingest: return "ingest";
    case ErrorKind::Asset: return "asset";
    case ErrorKind::Lifecycle: return "lifecycle";
    case ErrorKind::Validation: return "validation";
    }
    return "unknown";
}

} // namespace bemorl
