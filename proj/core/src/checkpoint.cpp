#include "fiscalforge/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'F', 'C', 'K', 'P', 'T', '0', '1'};
// Guards against absurd allocations from corrupted headers.
constexpr std::uint64_t kMaxParams = std::uint64_t{1} << 28;
constexpr std::uint32_t kMaxWidth = 1u << 20;

template <typename U>
void put_le(std::ostream& out, U value) {
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
    std::array<unsigned char, sizeof(U)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw ArtifactError("checkpoint is truncated");
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
    return value;
}

std::uint32_t checked_u32(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw ArtifactError("checkpoint dimension does not fit in 32 bits");
    }
    return static_cast<std::uint32_t>(v);
}

std::size_t read_width(std::istream& in) {
    const auto w = get_le<std::uint32_t>(in);
    if (w == 0 || w > kMaxWidth) throw ArtifactError("checkpoint has an invalid layer width");
    return w;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Network& net) {
    net.spec.validate();
    if (net.params.size() != net.spec.param_count()) {
        throw ShapeError("write_checkpoint: parameter count does not match the spec");
    }
    out.write(kMagic.data(), kMagic.size());
    put_le(out, checked_u32(net.spec.input_dim));
    put_le(out, checked_u32(net.spec.hidden_dims.size()));
    for (auto w : net.spec.hidden_dims) put_le(out, checked_u32(w));
    put_le(out, checked_u32(net.spec.output_dim));
    put_le(out, static_cast<std::uint32_t>(net.spec.head));
    put_le(out, static_cast<std::uint64_t>(net.params.size()));
    for (double v : net.params) put_le(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw ArtifactError("failed writing checkpoint");
}

Network read_checkpoint(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw ArtifactError("not a checkpoint file (bad magic)");

    Network net;
    net.spec.input_dim = read_width(in);
    const auto hidden = get_le<std::uint32_t>(in);
    if (hidden == 0 || hidden > 64) throw ArtifactError("checkpoint has an invalid layer count");
    for (std::uint32_t i = 0; i < hidden; ++i) net.spec.hidden_dims.push_back(read_width(in));
    net.spec.output_dim = read_width(in);
    const auto head = get_le<std::uint32_t>(in);
    if (head > 1) throw ArtifactError("checkpoint has an unknown output head");
    net.spec.head = static_cast<OutputHead>(head);

    const auto count = get_le<std::uint64_t>(in);
    if (count > kMaxParams || count != net.spec.param_count()) {
        throw ArtifactError("checkpoint parameter count does not match its spec");
    }
    net.params.resize(count);
    for (auto& v : net.params) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ArtifactError("checkpoint has trailing bytes");
    }
    return net;
}

void save_checkpoint(const std::filesystem::path& path, const Network& net) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot open '" + path.string() + "' for writing");
    write_checkpoint(out, net);
}

Network load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("cannot open checkpoint '" + path.string() + "'");
    try {
        return read_checkpoint(in);
    } catch (const ArtifactError& e) {
        throw ArtifactError(path.string() + ": " + e.what());
    }
}

nlohmann::json checkpoint_to_json(const Network& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : unflatten(net.params, net.spec)) {
        layers.push_back({{"in", layer.in},
                          {"out", layer.out},
                          {"weights", layer.weights},
                          {"bias", layer.bias}});
    }
    return {{"spec",
             {{"input_dim", net.spec.input_dim},
              {"hidden_dims", net.spec.hidden_dims},
              {"output_dim", net.spec.output_dim},
              {"head", net.spec.head == OutputHead::simplex ? "simplex" : "linear"}}},
            {"param_count", net.params.size()},
            {"layers", layers}};
}

}  // namespace fiscalforge
