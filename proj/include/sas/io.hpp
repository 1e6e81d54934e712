#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sas/volume.hpp"

namespace sas {

enum class VolumeFormat { nifti, nifti_gz, raw };

/// Any volume the readers can produce or the writers can consume.
using AnyVolume = std::variant<LabelVolume, ScalarVolume, BinaryMask>;

struct LoadedVolume {
  AnyVolume volume;
  /// Header-inspection notes, e.g. ignored qform/sform orientation.
  std::vector<std::string> warnings;
};

/// Picks the format from the file name (.nii, .nii.gz, .json/.bin).
VolumeFormat format_from_path(const std::filesystem::path& path);

/// Reads a NIfTI-1 (optionally gzip-compressed) or raw+sidecar volume.
///
/// Integer payloads (uint8, int16, uint16) decode to a LabelVolume, float32
/// payloads and any payload with a non-trivial scl_slope/scl_inter decode to
/// a ScalarVolume. Only pixdim[1..3] is honored; orientation matrices are
/// reported in `warnings` and otherwise ignored.
LoadedVolume read_volume(const std::filesystem::path& path,
                         std::optional<VolumeFormat> format_hint = std::nullopt);

/// read_volume() narrowed to labels. Float payloads are accepted when every
/// value is a non-negative integer.
LabelVolume read_label_volume(const std::filesystem::path& path,
                              std::optional<VolumeFormat> format_hint = std::nullopt);

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed write never leaves a partial file.
///
/// Labels are stored as uint8 when they fit, else uint16; masks as uint8;
/// scalars as float32. For the raw format, `path` may name either the .bin
/// payload or the .json sidecar; both are written.
void write_volume(const AnyVolume& vol, const std::filesystem::path& path,
                  std::optional<VolumeFormat> format = std::nullopt);

}  // namespace sas
