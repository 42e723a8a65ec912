#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "ooclab/volume.hpp"

namespace ooclab {

/// NRRD subset used throughout the pipeline: NRRD0004 magic, a fixed set of
/// header fields, raw little-endian payload, float32 for intensity volumes
/// and uint8 for label volumes. Writing is canonical (fixed field order), so
/// equal volumes serialize to identical bytes.

std::string write_volume(const VoxelVolume& volume);
std::string write_volume(const LabelVolume& volume);

using AnyVolume = std::variant<VoxelVolume, LabelVolume>;

/// Parses a NRRD-subset byte stream. Element type float loads as a
/// VoxelVolume, uint8 as a LabelVolume. Throws FormatError on bad magic,
/// missing or unknown fields, unsupported encoding/type, or a payload whose
/// size disagrees with the header.
AnyVolume read_volume(std::string_view bytes);

VoxelVolume read_voxel_volume(std::string_view bytes);
LabelVolume read_label_volume(std::string_view bytes);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::string_view bytes);

AnyVolume read_volume_file(const std::filesystem::path& path);
VoxelVolume read_voxel_volume_file(const std::filesystem::path& path);
LabelVolume read_label_volume_file(const std::filesystem::path& path);
void write_volume_file(const std::filesystem::path& path,
                       const VoxelVolume& volume);
void write_volume_file(const std::filesystem::path& path,
                       const LabelVolume& volume);

}  // namespace ooclab
