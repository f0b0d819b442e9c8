#pragma once

#include <stdexcept>
#include <string>

namespace debias {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction / validation
struct InvalidArgument : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct InvalidRho : Error { using Error::Error; };
struct BlockMismatch : Error { using Error::Error; };
struct InvalidDf : Error { using Error::Error; };
struct InvalidModel : Error { using Error::Error; };

// Statistics
struct DegenerateVariance : Error {
  explicit DegenerateVariance(int feature_index)
      : Error("degenerate (zero) variance at feature " + std::to_string(feature_index)),
        feature(feature_index) {}
  int feature;
};
struct MissingGroup : Error { using Error::Error; };
struct NonPositiveSigma : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };

// Baselines
struct TooFewFeatures : Error { using Error::Error; };
struct IrlsDiverged : Error { using Error::Error; };
struct EmptyRange : Error { using Error::Error; };
struct OutOfFitRange : Error { using Error::Error; };

// Evaluation
struct KTooLarge : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct GroupTooSmall : Error { using Error::Error; };

// I/O
struct ParseError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace debias
