#ifndef AQUA_CHECKPOINT_HPP
#define AQUA_CHECKPOINT_HPP

#include "aqua/network.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace aqua {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format stores little-endian floats");

/// Checkpoint I/O errors: distinguishes truncated/garbled files from files
/// whose tensors do not match the architecture.
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[4] = {'A', 'Q', 'R', 'S'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw CheckpointError("checkpoint truncated");
    return v;
}

inline void write_tensor(std::ostream& os, const std::vector<std::uint32_t>& dims,
                         const std::vector<double>& data) {
    write_u32(os, static_cast<std::uint32_t>(dims.size()));
    for (std::uint32_t d : dims) write_u32(os, d);
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
}

inline void read_tensor(std::istream& is, const std::vector<std::uint32_t>& expected_dims,
                        std::vector<double>& data) {
    const std::uint32_t rank = read_u32(is);
    if (rank != expected_dims.size()) throw CheckpointError("checkpoint tensor shape mismatch");
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint32_t d = read_u32(is);
        if (d != expected_dims[i]) throw CheckpointError("checkpoint tensor shape mismatch");
        count *= d;
    }
    data.resize(count);
    if (!is.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(count * sizeof(double))))
        throw CheckpointError("checkpoint truncated");
}

// Row-major flattening of a bank: (out, in, kh, kw).
inline std::vector<double> flatten_weights(const ConvKernels& bank) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(bank.out_channels()) * bank.in_channels() *
                 bank.kh() * bank.kw());
    for (const auto& kern : bank.w)
        for (const auto& plane : kern)
            for (Eigen::Index y = 0; y < plane.rows(); ++y)
                for (Eigen::Index x = 0; x < plane.cols(); ++x) flat.push_back(plane(y, x));
    return flat;
}

inline void unflatten_weights(const std::vector<double>& flat, ConvKernels& bank) {
    std::size_t idx = 0;
    for (auto& kern : bank.w)
        for (auto& plane : kern)
            for (Eigen::Index y = 0; y < plane.rows(); ++y)
                for (Eigen::Index x = 0; x < plane.cols(); ++x) plane(y, x) = flat[idx++];
}

inline std::vector<std::uint32_t> weight_dims(const ConvKernels& bank) {
    return {static_cast<std::uint32_t>(bank.out_channels()),
            static_cast<std::uint32_t>(bank.in_channels()),
            static_cast<std::uint32_t>(bank.kh()), static_cast<std::uint32_t>(bank.kw())};
}

} // namespace detail

inline void save_params(const ModelParams& p, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw CheckpointError("cannot open checkpoint for writing: " + path);
    os.write(kCheckpointMagic, 4);
    detail::write_u32(os, kCheckpointVersion);
    p.for_each_bank([&](const ConvKernels& bank) {
        detail::write_tensor(os, detail::weight_dims(bank), detail::flatten_weights(bank));
        std::vector<double> b(bank.bias.data(), bank.bias.data() + bank.bias.size());
        detail::write_tensor(os, {static_cast<std::uint32_t>(bank.out_channels())}, b);
    });
    if (!os) throw CheckpointError("write failure: " + path);
}

inline ModelParams load_params(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("cannot open checkpoint: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw CheckpointError("not a checkpoint file (bad magic)");
    if (detail::read_u32(is) != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version");
    ModelParams p;
    p.for_each_bank([&](ConvKernels& bank) {
        std::vector<double> flat;
        detail::read_tensor(is, detail::weight_dims(bank), flat);
        detail::unflatten_weights(flat, bank);
        std::vector<double> b;
        detail::read_tensor(is, {static_cast<std::uint32_t>(bank.out_channels())}, b);
        for (Eigen::Index i = 0; i < bank.bias.size(); ++i) bank.bias(i) = b[i];
    });
    return p;
}

} // namespace aqua

#endif
