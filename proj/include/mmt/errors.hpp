#pragma once

#include <stdexcept>
#include <string>

namespace mmt {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// measure-core
struct ZeroMass : Error {
    ZeroMass() : Error("operation requires positive mass") {}
};
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& what) : Error(what) {}
};
struct NotDominated : Error {
    explicit NotDominated(const std::string& what) : Error(what) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

// convex-order
struct NotInConvexOrder : Error {
    explicit NotInConvexOrder(const std::string& what) : Error(what) {}
};
// Raised when an irreducible-component endpoint carries an atom; the
// decomposition is ambiguous there and we refuse to guess.
struct BoundaryAtom : Error {
    explicit BoundaryAtom(const std::string& what) : Error(what) {}
};

// shadow-engine
struct NotDominatedE : Error {
    explicit NotDominatedE(const std::string& what) : Error(what) {}
};

// coupling-core
struct MarginalMismatch : Error {
    explicit MarginalMismatch(const std::string& what) : Error(what) {}
};

// transport-builders
struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error(what) {}
};
struct NotMartingale : Error {
    explicit NotMartingale(const std::string& what) : Error(what) {}
};
struct AtomicSecondMarginal : Error {
    explicit AtomicSecondMarginal(const std::string& what) : Error(what) {}
};
struct NotDecomposition : Error {
    explicit NotDecomposition(const std::string& what) : Error(what) {}
};
struct AtomicInput : Error {
    explicit AtomicInput(const std::string& what) : Error(what) {}
};

// mot-oracle
struct Infeasible : Error {
    explicit Infeasible(const std::string& what) : Error(what) {}
};
struct SizeCap : Error {
    explicit SizeCap(const std::string& what) : Error(what) {}
};

}  // namespace mmt
