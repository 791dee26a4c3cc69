#ifndef SPOC_ERRORS_HPP
#define SPOC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spoc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments: shapes, ranges, non-finite data, malformed files.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// A matrix is (numerically) rank deficient at the requested level.
class SingularityError : public Error {
  public:
    using Error::Error;
};

/// SPA ran out of nonzero residual columns before selecting r rows.
class RankDeficiencyError : public Error {
  public:
    using Error::Error;
};

/// The selected anchor block Ĥ cannot be inverted.
class DegenerateAnchorError : public Error {
  public:
    using Error::Error;
};

/// Adaptive rank selection produced fewer than two topics or exceeded the cap.
class UnderdeterminedRankError : public Error {
  public:
    using Error::Error;
};

} // namespace spoc

#endif // SPOC_ERRORS_HPP
