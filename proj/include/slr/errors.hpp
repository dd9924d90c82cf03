#pragma once

#include <stdexcept>

namespace slr {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct DegenerateFrame : Error { using Error::Error; };
struct DegenerateProjection : Error { using Error::Error; };

// nn / training
struct DimensionMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct TraceMismatch : Error { using Error::Error; };
struct LabelOutOfRange : Error { using Error::Error; };
struct InvalidDimension : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };

// evaluation
struct InsufficientSigners : Error { using Error::Error; };
struct InsufficientClasses : Error { using Error::Error; };
struct EmptyTestSet : Error { using Error::Error; };

// datagen
struct InvalidConfig : Error { using Error::Error; };

// dataio
struct IoError : Error { using Error::Error; };
struct MalformedManifest : Error { using Error::Error; };
struct MalformedGesture : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct TensorShapeMismatch : Error { using Error::Error; };
struct TruncatedFile : Error { using Error::Error; };

}  // namespace slr
