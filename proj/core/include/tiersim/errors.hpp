#pragma once

#include <stdexcept>
#include <string>

namespace tiersim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Policy stages were asked to analyze a histogram with no samples in it.
struct AllZeroHistogram : Error {
  AllZeroHistogram() : Error("histogram has no samples") {}
};

/// heat_density was called with a window offset not aligned to the window length.
struct MisalignedWindow : Error {
  using Error::Error;
};

struct DoubleFree : Error {
  using Error::Error;
};

struct UnmappedAddress : Error {
  using Error::Error;
};

struct SlowTierFull : Error {
  using Error::Error;
};

struct BadMagic : Error {
  BadMagic() : Error("trace file has a bad magic header") {}
};

struct TruncatedFile : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

/// Anything wrong with user-supplied configuration. The CLI maps this
/// family to exit code 1; every other Error maps to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace tiersim
