#pragma once

#include <stdexcept>
#include <string>

namespace expstable {

// Quadrature tail failed to converge, or a pairing is not integrable.
struct NonIntegrableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact window sampling requires a finite a.s. upper bound on the decoration.
struct UnboundedDecorationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowTooSmallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateAlphaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NullDecorationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParticleOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonpositiveMartingaleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid type invariants or malformed configuration input.
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace expstable
