#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>
#include <Eigen/Dense>

namespace pclasso {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<Index>;

/// Error categories. The CLI maps them onto exit codes.
enum class ErrorKind { usage, data, numerical };

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind)
    {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Invalid argument or configuration supplied by the caller.
struct UsageError : Error
{
    explicit UsageError(const std::string& msg) : Error(ErrorKind::usage, msg) {}
};

/// Malformed or inconsistent input data.
struct DataError : Error
{
    explicit DataError(const std::string& msg) : Error(ErrorKind::data, msg) {}
};

/// A numerical procedure could not produce a result.
struct NumericalError : Error
{
    explicit NumericalError(const std::string& msg) : Error(ErrorKind::numerical, msg) {}
};

enum class Family { gaussian, binomial };

inline const char* to_string(Family f)
{
    return f == Family::gaussian ? "gaussian" : "binomial";
}

inline Family family_from_string(const std::string& s)
{
    if (s == "gaussian") return Family::gaussian;
    if (s == "binomial") return Family::binomial;
    throw UsageError("unknown family '" + s + "' (expected gaussian or binomial)");
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline double soft_threshold(double z, double lambda)
{
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

} // namespace pclasso
