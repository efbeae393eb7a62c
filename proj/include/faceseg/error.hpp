#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace faceseg {

enum class ErrorKind {
  kUnknownColor,
  kDegenerateLandmarks,
  kMissingLandmarks,
  kNoConvergence,
  kEmptyRegion,
  kAssetAnchorMissing,
  kMissingSourceFace,
  kMissingLabels,
  kMalformedSegmentFile,
  kUnknownSegment,
  kUnknownClass,
  kOutOfBounds,
  kDimensionMismatch,
  kEmptyMatrix,
  kMissingBaseline,
  kNoEligibleFaces,
  kUnsatisfiableConstraint,
  kInvalidManifest,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownColor: return "UnknownColor";
    case ErrorKind::kDegenerateLandmarks: return "DegenerateLandmarks";
    case ErrorKind::kMissingLandmarks: return "MissingLandmarks";
    case ErrorKind::kNoConvergence: return "NoConvergence";
    case ErrorKind::kEmptyRegion: return "EmptyRegion";
    case ErrorKind::kAssetAnchorMissing: return "AssetAnchorMissing";
    case ErrorKind::kMissingSourceFace: return "MissingSourceFace";
    case ErrorKind::kMissingLabels: return "MissingLabels";
    case ErrorKind::kMalformedSegmentFile: return "MalformedSegmentFile";
    case ErrorKind::kUnknownSegment: return "UnknownSegment";
    case ErrorKind::kUnknownClass: return "UnknownClass";
    case ErrorKind::kOutOfBounds: return "OutOfBounds";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kEmptyMatrix: return "EmptyMatrix";
    case ErrorKind::kMissingBaseline: return "MissingBaseline";
    case ErrorKind::kNoEligibleFaces: return "NoEligibleFaces";
    case ErrorKind::kUnsatisfiableConstraint: return "UnsatisfiableConstraint";
    case ErrorKind::kInvalidManifest: return "InvalidManifest";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace faceseg
