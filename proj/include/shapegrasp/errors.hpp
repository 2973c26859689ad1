#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace shapegrasp {

// Base error carrying a stable machine-readable kind tag. The CLI maps the
// tag onto structured stderr JSON; library callers can catch specific types.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define SHAPEGRASP_ERROR_TYPE(Name)                              \
  struct Name : Error {                                          \
    explicit Name(const std::string& m) : Error(#Name, m) {}     \
  }

SHAPEGRASP_ERROR_TYPE(FileFormatError);
SHAPEGRASP_ERROR_TYPE(DimensionMismatch);
SHAPEGRASP_ERROR_TYPE(EmptyMask);
SHAPEGRASP_ERROR_TYPE(DegeneratePointCloud);
SHAPEGRASP_ERROR_TYPE(DegenerateGeometry);
SHAPEGRASP_ERROR_TYPE(NonSimplePolygon);
SHAPEGRASP_ERROR_TYPE(DegeneratePart);
SHAPEGRASP_ERROR_TYPE(NoValidDepth);
SHAPEGRASP_ERROR_TYPE(BackendUnavailable);
SHAPEGRASP_ERROR_TYPE(SchemaViolation);
SHAPEGRASP_ERROR_TYPE(MissingNodeInResponse);
SHAPEGRASP_ERROR_TYPE(RulebookMissingEntry);
SHAPEGRASP_ERROR_TYPE(SpecOverlapError);
SHAPEGRASP_ERROR_TYPE(ConfigError);

#undef SHAPEGRASP_ERROR_TYPE

}  // namespace shapegrasp
