#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json_fwd.hpp>

#include "fiscalforge/neural.hpp"

namespace fiscalforge {

/// A network's shape together with its flat parameters.
struct Network {
    MlpSpec spec;
    ParamVector params;

    bool operator==(const Network&) const = default;
};

// Binary checkpoint layout, all integers and doubles little-endian:
//
//   char[8]  magic "FFCKPT01"
//   u32      input_dim
//   u32      hidden layer count H
//   u32[H]   hidden widths
//   u32      output_dim
//   u32      head (0 = simplex, 1 = linear)
//   u64      parameter count P
//   f64[P]   parameters in flat layout
void write_checkpoint(std::ostream& out, const Network& net);
Network read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Network& net);
Network load_checkpoint(const std::filesystem::path& path);

/// Human-readable export: spec plus per-layer weights and biases.
nlohmann::json checkpoint_to_json(const Network& net);

}  // namespace fiscalforge
