#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtpred {

enum class ErrorKind {
    DuplicatePoint,
    TooFewPoints,
    NotPlanar,
    DuplicateEdge,
    NotFlippable,
    NotTriangulation,
    IdCollision,
    VertexMismatch,
    InvalidInput,
    Parse,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DuplicatePoint: return "DuplicatePoint";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::NotPlanar: return "NotPlanar";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::NotFlippable: return "NotFlippable";
    case ErrorKind::NotTriangulation: return "NotTriangulation";
    case ErrorKind::IdCollision: return "IdCollision";
    case ErrorKind::VertexMismatch: return "VertexMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Exact predicate and traversal tallies. Thread-local so concurrent trials
/// keep separate books.
struct OpCounters {
    std::uint64_t orient = 0;
    std::uint64_t incircle = 0;
    std::uint64_t exact_fallbacks = 0;
    std::uint64_t walk_steps = 0;
    std::uint64_t locate_queries = 0;
    std::uint64_t flips = 0;

    OpCounters operator-(const OpCounters& o) const
    {
        return {orient - o.orient, incircle - o.incircle, exact_fallbacks - o.exact_fallbacks,
                walk_steps - o.walk_steps, locate_queries - o.locate_queries, flips - o.flips};
    }
};

inline OpCounters& counters()
{
    thread_local OpCounters c;
    return c;
}

} // namespace dtpred
