#pragma once

#include <stdexcept>
#include <string>

namespace fj {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters or malformed input data (files, vectors of the wrong size).
class DataError : public Error {
public:
    using Error::Error;
};

/// The fixed-point system has no unique solution, e.g. a closed group of
/// nodes with zero resistance that never reaches an anchored node.
class NonUniqueEquilibrium : public Error {
public:
    using Error::Error;
};

/// An iterative procedure hit its iteration or step cap.
class NonConvergence : public Error {
public:
    using Error::Error;
};

} // namespace fj
