#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pet/horizontal.hpp"
#include "pet/image.hpp"
#include "pet/masks.hpp"
#include "pet/stack.hpp"

namespace pet {

// ---- PFM (portable float map) ----------------------------------------
// "PF" = 3 channel, "Pf" = 1 channel; negative scale means little-endian
// payload; rows are stored bottom-up (the de-facto standard). Reading
// rejects non-finite values; writing is byte-deterministic.
ImageF read_pfm(const std::string& path);
void write_pfm(const std::string& path, const ImageF& img);

// ---- Estimate stacks --------------------------------------------------
// Binary container: magic "PES1"; header of little-endian u32 fields
// (width, height, channels, M, flags); then M full-resolution float32
// planes (little-endian, row-major, channel-interleaved); then optional
// alpha and beta planes when flag bits 0/1 are set.
EstimateStack read_stack(const std::string& path);
void write_stack(const std::string& path, const EstimateStack& stack);

// ---- 16-bit PGM -------------------------------------------------------
// Header exactly "P5\n<w> <h>\n65535\n"; payload big-endian u16.
void write_pgm16(const std::string& path, int w, int h, const std::vector<uint16_t>& v);
std::vector<uint16_t> read_pgm16(const std::string& path, int& w, int& h);

// Mask ranks as PGM16 (requires <= 65536 entries).
void write_mask(const std::string& path, const DitherMask& mask);
DitherMask read_mask(const std::string& path);

// Selection indices as PGM16.
void write_selection(const std::string& path, const SelectionImage& sel);
SelectionImage read_selection(const std::string& path);

// Permutation as CSV rows "index,source" (header line included) ...
void write_permutation_csv(const std::string& path, const Permutation& p);
Permutation read_permutation_csv(const std::string& path);
// ... and as a two-plane displacement map: one PGM16 of size W x 2H, the
// top plane dx+32768, the bottom plane dy+32768.
void write_displacement_map(const std::string& path, const Permutation& p);

// ---- 8-bit PPM preview ------------------------------------------------
// "P6", maxval 255; values clamped to [0,1] and rounded. Scalar images
// replicate to grey.
void write_ppm(const std::string& path, const ImageF& img);

// ---- CSV traces / profiles -------------------------------------------
void write_trace_csv(const std::string& path, const std::vector<double>& trace);

// ---- misc -------------------------------------------------------------
// FNV-1a 64-bit content hash of a file, as fixed-width hex.
std::string file_hash_hex(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace pet
