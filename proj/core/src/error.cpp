#include "typicality/error.hpp"

namespace typicality {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

DimensionError::DimensionError(std::size_t expected, std::size_t actual)
    : Error("dimension mismatch: expected " + std::to_string(expected) + " attributes, got " +
            std::to_string(actual)) {}

ConvergenceError::ConvergenceError(const std::string& what, double residual)
    : TrainingError(what), residual_(residual) {}

}  // namespace typicality
