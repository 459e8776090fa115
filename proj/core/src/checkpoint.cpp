#include "fdct/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "fdct/errors.hpp"

namespace fdct {

namespace {

constexpr char kMagic[8] = {'F', 'D', 'C', 'T', '-', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

void append_bytes(std::string& out, const void* data, std::size_t n) {
    out.append(static_cast<const char*>(data), n);
}

template <typename T>
void append_pod(std::string& out, T v) {
    append_bytes(out, &v, sizeof(T));
}

void append_section(std::string& out, const std::string& name, const std::string& payload) {
    append_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    append_pod<std::uint64_t>(out, payload.size());
    out += payload;
}

std::string encode_tensor(const nn::Shape& shape, const std::vector<double>& data) {
    std::string payload;
    append_pod<std::uint32_t>(payload, static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) append_pod<std::int64_t>(payload, d);
    append_bytes(payload, data.data(), data.size() * sizeof(double));
    return payload;
}

std::pair<nn::Shape, std::vector<double>> decode_tensor(const std::string& payload,
                                                        const std::string& what) {
    std::size_t off = 0;
    auto need = [&](std::size_t n) {
        if (off + n > payload.size()) throw IoError("checkpoint: truncated tensor " + what);
    };
    need(sizeof(std::uint32_t));
    std::uint32_t ndim;
    std::memcpy(&ndim, payload.data() + off, sizeof(ndim));
    off += sizeof(ndim);
    if (ndim > 8) throw IoError("checkpoint: implausible tensor rank in " + what);
    nn::Shape shape(ndim);
    for (auto& d : shape) {
        need(sizeof(std::int64_t));
        std::memcpy(&d, payload.data() + off, sizeof(d));
        off += sizeof(d);
    }
    const std::int64_t count = nn::shape_numel(shape);
    need(static_cast<std::size_t>(count) * sizeof(double));
    std::vector<double> data(static_cast<std::size_t>(count));
    std::memcpy(data.data(), payload.data() + off, data.size() * sizeof(double));
    off += data.size() * sizeof(double);
    if (off != payload.size()) throw IoError("checkpoint: trailing bytes in tensor " + what);
    return {std::move(shape), std::move(data)};
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::string out;
    append_bytes(out, kMagic, sizeof(kMagic));
    append_pod<std::uint32_t>(out, kVersion);

    append_section(out, "config", ckpt.config_text);
    {
        std::string payload;
        append_pod<std::int64_t>(payload, ckpt.iteration);
        append_section(out, "iteration", payload);
    }
    append_section(out, "rng", ckpt.rng_state);
    {
        std::string payload;
        append_pod<std::int64_t>(payload, ckpt.adam.step);
        append_section(out, "adam.step", payload);
    }
    for (const auto& [name, tensor] : ckpt.tensors)
        append_section(out, "param:" + name, encode_tensor(tensor.first, tensor.second));
    for (const auto& [name, m] : ckpt.adam.m)
        append_section(out, "adam.m:" + name,
                       encode_tensor({static_cast<std::int64_t>(m.size())}, m));
    for (const auto& [name, v] : ckpt.adam.v)
        append_section(out, "adam.v:" + name,
                       encode_tensor({static_cast<std::int64_t>(v.size())}, v));

    const uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data()),
                            static_cast<uInt>(out.size()));
    append_pod<std::uint32_t>(out, static_cast<std::uint32_t>(crc));

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof(kMagic) + sizeof(std::uint32_t) * 2)
        throw IoError("checkpoint too short: " + path);
    if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw IoError("not a checkpoint file: " + path);
    std::uint32_t version;
    std::memcpy(&version, buf.data() + sizeof(kMagic), sizeof(version));
    if (version != kVersion)
        throw IoError("incompatible checkpoint version " + std::to_string(version) + " (expected " +
                      std::to_string(kVersion) + "): " + path);

    const std::size_t body_end = buf.size() - sizeof(std::uint32_t);
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, buf.data() + body_end, sizeof(stored_crc));
    const uLong crc =
        crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(body_end));
    if (static_cast<std::uint32_t>(crc) != stored_crc)
        throw IoError("checkpoint integrity check failed (bad checksum): " + path);

    Checkpoint ckpt;
    std::size_t off = sizeof(kMagic) + sizeof(std::uint32_t);
    while (off < body_end) {
        auto need = [&](std::size_t n) {
            if (off + n > body_end) throw IoError("checkpoint: truncated section table: " + path);
        };
        need(sizeof(std::uint32_t));
        std::uint32_t name_len;
        std::memcpy(&name_len, buf.data() + off, sizeof(name_len));
        off += sizeof(name_len);
        if (name_len > 4096) throw IoError("checkpoint: implausible section name: " + path);
        need(name_len);
        const std::string name(buf.data() + off, name_len);
        off += name_len;
        need(sizeof(std::uint64_t));
        std::uint64_t payload_len;
        std::memcpy(&payload_len, buf.data() + off, sizeof(payload_len));
        off += sizeof(payload_len);
        need(payload_len);
        const std::string payload(buf.data() + off, payload_len);
        off += payload_len;

        if (name == "config") {
            ckpt.config_text = payload;
        } else if (name == "iteration") {
            if (payload.size() != sizeof(std::int64_t))
                throw IoError("checkpoint: bad iteration section: " + path);
            std::memcpy(&ckpt.iteration, payload.data(), sizeof(std::int64_t));
        } else if (name == "rng") {
            ckpt.rng_state = payload;
        } else if (name == "adam.step") {
            if (payload.size() != sizeof(std::int64_t))
                throw IoError("checkpoint: bad adam.step section: " + path);
            std::memcpy(&ckpt.adam.step, payload.data(), sizeof(std::int64_t));
        } else if (name.rfind("param:", 0) == 0) {
            ckpt.tensors[name.substr(6)] = decode_tensor(payload, name);
        } else if (name.rfind("adam.m:", 0) == 0) {
            ckpt.adam.m[name.substr(7)] = decode_tensor(payload, name).second;
        } else if (name.rfind("adam.v:", 0) == 0) {
            ckpt.adam.v[name.substr(7)] = decode_tensor(payload, name).second;
        } else {
            throw IoError("checkpoint: unknown section '" + name + "': " + path);
        }
    }
    return ckpt;
}

void capture_params(Checkpoint& ckpt, const nn::ParamStore& params) {
    ckpt.tensors.clear();
    for (const auto& [name, tensor] : params.map())
        ckpt.tensors[name] = {tensor.shape(), tensor.data()};
}

void restore_params(const Checkpoint& ckpt, nn::ParamStore& params) {
    for (auto& [name, tensor] : params.map()) {
        auto it = ckpt.tensors.find(name);
        if (it == ckpt.tensors.end())
            throw IoError("checkpoint is missing parameter '" + name + "'");
        if (it->second.first != tensor.shape())
            throw IoError("checkpoint parameter '" + name + "' has shape " +
                          nn::shape_str(it->second.first) + ", expected " +
                          nn::shape_str(tensor.shape()));
        tensor.raw() = it->second.second;
    }
    if (ckpt.tensors.size() != params.size())
        throw IoError("checkpoint carries " + std::to_string(ckpt.tensors.size()) +
                      " parameters, architecture expects " + std::to_string(params.size()));
}

}  // namespace fdct
