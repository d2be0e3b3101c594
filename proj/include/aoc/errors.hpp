#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aoc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error
{
public:
  using Error::Error;
};

/// so(3) logarithm requested too close to a half-turn.
class AngleOutOfRange : public Error
{
public:
  AngleOutOfRange(double angle)
    : Error("rotation angle " + std::to_string(angle) + " is outside the log-map injectivity radius"),
      angle_(angle)
  {
  }
  double angle() const { return angle_; }

private:
  double angle_;
};

/// A state or costate component became NaN/inf during integration.
class NonFinite : public Error
{
public:
  NonFinite(std::size_t step)
    : Error("non-finite state encountered at step " + std::to_string(step)), step_(step)
  {
  }
  std::size_t step() const { return step_; }

private:
  std::size_t step_;
};

/// d2L/du2 is (numerically) singular: the point is not in the regular set.
class SingularRegularity : public Error
{
public:
  using Error::Error;
};

class NoConvergence : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace aoc
