#pragma once

#include <stdexcept>
#include <string>

namespace batchsurf {

/// Exception carrying a module-specific error code alongside the message.
/// Catch sites test the code, logs get the message.
template <typename Code>
class CodedError : public std::runtime_error {
public:
    CodedError(Code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Code code() const noexcept { return code_; }

private:
    Code code_;
};

// volume-io
enum class DicomErrc {
    MissingMagic,
    UnsupportedTransferSyntax,
    MissingRequiredTag,
    TruncatedPixelData,
};
using DicomError = CodedError<DicomErrc>;

enum class SeriesErrc {
    InconsistentGeometry,
    NonUniformSpacing,
    TooFewSlices,
};
using SeriesError = CodedError<SeriesErrc>;

enum class RawVolumeErrc {
    HeaderParse,
    PayloadSizeMismatch,
};
using RawVolumeError = CodedError<RawVolumeErrc>;

// manifest
enum class ManifestErrc {
    BadHeader,
    BadDirection,
    EmptyPacket,
    DuplicatePacketId,
    DuplicateSpecimen,
};
using ManifestError = CodedError<ManifestErrc>;

// segmentation (chop CSV re-ingestion)
enum class ChopCsvErrc {
    BadHeader,
    BadBounds,
    OverlappingZ,
};
using ChopCsvError = CodedError<ChopCsvErrc>;

// surfacing
enum class SurfaceErrc {
    BoxOutOfRange,
    EmptyMesh,
    EmptyMeshRender,
};
using SurfaceError = CodedError<SurfaceErrc>;

// phantom
enum class PhantomErrc {
    ShapeOutOfBounds,
    OverlapViolation,
};
using PhantomError = CodedError<PhantomErrc>;

// pipeline configuration / orchestration
enum class ConfigErrc {
    UnknownKey,
    BadValue,
};
using ConfigError = CodedError<ConfigErrc>;

enum class PipelineErrc {
    DuplicateOutputName,
};
using PipelineError = CodedError<PipelineErrc>;

}  // namespace batchsurf
