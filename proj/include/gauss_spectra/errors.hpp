#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gauss_spectra {

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A rational input ran out of partial quotients before the requested depth.
class expansion_terminated : public std::runtime_error {
 public:
  expansion_terminated(std::size_t available, std::size_t requested)
      : std::runtime_error("continued fraction terminates after " + std::to_string(available) +
                           " digits; " + std::to_string(requested) + " requested"),
        available_(available) {}

  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t available_;
};

// A floating input no longer determines the next digit.
class precision_exhausted : public std::runtime_error {
 public:
  precision_exhausted(std::size_t reached, std::size_t requested)
      : std::runtime_error("floating input determines only " + std::to_string(reached) +
                           " digits; " + std::to_string(requested) +
                           " requested (pass an exact rational for deeper expansions)"),
        reached_(reached) {}

  std::size_t reached() const noexcept { return reached_; }

 private:
  std::size_t reached_;
};

class non_convergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class bracket_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exponent outside the range a spectrum solver supports.
class window_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Two routes to the same quantity disagree beyond tolerance.
class consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gauss_spectra
