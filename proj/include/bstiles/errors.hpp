#pragma once

#include <stdexcept>
#include <string>

namespace bstiles {

// Malformed textual input (words, rationals, JSON files). Carries a
// human-readable location where one is known.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A point fed to a piecewise map lies outside every branch interval.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Backward orbit extension found no branch preimage.
struct NoPreimageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An orbit was asked for a height outside its window.
struct OrbitWindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A tile-shaped pattern was requested at an anchor whose edges are not
// all present in the patch.
struct IncompletePatternError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An affine system violates its structural requirements.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bstiles
