#include "eas/model_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "eas/csv.hpp"
#include "eas/error.hpp"

namespace eas {

namespace {

constexpr char kMagic[] = "EAS-MODEL 1";

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

void put_double_le(std::string& out, double x) {
    put_u64_le(out, std::bit_cast<std::uint64_t>(x));
}

class PayloadReader {
public:
    PayloadReader(const std::string& bytes, Encoding enc)
        : bytes_(bytes), enc_(enc) {}

    double next_double() {
        if (enc_ == Encoding::binary) {
            return std::bit_cast<double>(next_raw_u64());
        }
        std::string tok = next_token();
        double v = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size()) {
            throw IoError("model payload: bad numeric token '" + tok + "'");
        }
        return v;
    }

    std::uint64_t next_u64() {
        if (enc_ == Encoding::binary) return next_raw_u64();
        std::string tok = next_token();
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size()) {
            throw IoError("model payload: bad integer token '" + tok + "'");
        }
        return v;
    }

    std::uint8_t next_byte() {
        if (enc_ == Encoding::binary) {
            if (pos_ >= bytes_.size()) throw IoError("model payload: truncated");
            return static_cast<std::uint8_t>(bytes_[pos_++]);
        }
        return static_cast<std::uint8_t>(next_u64());
    }

    void finish() const {
        if (pos_ != bytes_.size()) {
            throw IoError("model payload: trailing bytes");
        }
    }

private:
    std::uint64_t next_raw_u64() {
        if (pos_ + 8 > bytes_.size()) throw IoError("model payload: truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(bytes_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    std::string next_token() {
        while (pos_ < bytes_.size() && bytes_[pos_] == '\n') ++pos_;
        if (pos_ >= bytes_.size()) throw IoError("model payload: truncated");
        std::size_t end = bytes_.find('\n', pos_);
        if (end == std::string::npos) end = bytes_.size();
        std::string tok = bytes_.substr(pos_, end - pos_);
        pos_ = end;
        return tok;
    }

    const std::string& bytes_;
    Encoding enc_;
    std::size_t pos_ = 0;
};

std::string dist_name(RowDist d) {
    return d == RowDist::gaussian ? "gaussian" : "unit_sphere";
}

RowDist dist_from_name(const std::string& s) {
    if (s == "gaussian") return RowDist::gaussian;
    if (s == "unit_sphere") return RowDist::unit_sphere;
    throw IoError("model header: unknown distribution '" + s + "'");
}

}  // namespace

void save_model(const Approximator& m, const std::string& path, Encoding encoding) {
    const std::size_t n = m.input_dim();
    const std::size_t d = m.hidden_dim();
    if (n == 0 || d == 0) throw InputError("save_model: empty model");
    if (m.tau.dim() != d || m.readout.size() != d || m.counts.size() != d ||
        m.dead_mask.size() != d) {
        throw ShapeError("save_model: inconsistent model arrays");
    }

    // Payload: W row-major, taus, readout, counts, dead mask.
    std::string payload;
    if (encoding == Encoding::decimal) {
        std::string text;
        text.reserve(20 * (d * n + 3 * d));
        auto put = [&text](const std::string& tok) {
            text += tok;
            text += '\n';
        };
        for (double x : m.W.rows.data) put(fmt_g17(x));
        for (double x : m.tau.taus) put(fmt_g17(x));
        for (double x : m.readout) put(fmt_g17(x));
        for (std::uint64_t c : m.counts) put(std::to_string(c));
        for (std::uint8_t b : m.dead_mask) put(std::to_string(int(b)));
        payload = std::move(text);
    } else {
        payload.reserve(8 * (d * n + 3 * d) + d);
        for (double x : m.W.rows.data) put_double_le(payload, x);
        for (double x : m.tau.taus) put_double_le(payload, x);
        for (double x : m.readout) put_double_le(payload, x);
        for (std::uint64_t c : m.counts) put_u64_le(payload, c);
        for (std::uint8_t b : m.dead_mask) payload += static_cast<char>(b);
    }

    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));

    std::string out;
    out += kMagic;
    out += '\n';
    out += "encoding ";
    out += encoding == Encoding::decimal ? "decimal" : "binary";
    out += '\n';
    out += "input_dim " + std::to_string(n) + '\n';
    out += "hidden_dim " + std::to_string(d) + '\n';
    out += "dist " + dist_name(m.W.dist) + '\n';
    out += "sigma " + fmt_g17(m.W.sigma) + '\n';
    out += "seed " + std::to_string(m.W.seed) + '\n';
    out += "quantile_level " + fmt_g17(m.tau.quantile_level) + '\n';
    out += "sample_size " + std::to_string(m.tau.sample_size) + '\n';
    out += "source_seed " + std::to_string(m.tau.source_seed) + '\n';
    out += "global_mean " + fmt_g17(m.global_mean) + '\n';
    out += "dead_in_denominator " + std::to_string(int(m.dead_in_denominator)) + '\n';
    out += "payload_bytes " + std::to_string(payload.size()) + '\n';
    out += "checksum ";
    out += hex;
    out += '\n';
    out += "payload\n";
    out += payload;
    write_text_file(path, out);
}

Approximator load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string blob((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    in.close();

    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        if (pos >= blob.size()) throw IoError("model header: truncated");
        std::size_t end = blob.find('\n', pos);
        if (end == std::string::npos) throw IoError("model header: truncated");
        std::string line = blob.substr(pos, end - pos);
        pos = end + 1;
        return line;
    };

    if (next_line() != kMagic) {
        throw IoError("model header: unsupported format or version");
    }

    Encoding enc = Encoding::decimal;
    std::size_t n = 0, d = 0;
    RowDist dist = RowDist::unit_sphere;
    double sigma = 0.0, quantile_level = 0.0, global_mean = 0.0;
    std::uint64_t seed = 0, source_seed = 0;
    std::size_t sample_size = 0, payload_bytes = 0;
    bool dead_in_denominator = true;
    std::string checksum_hex;

    for (;;) {
        std::string line = next_line();
        if (line == "payload") break;
        std::size_t sp = line.find(' ');
        if (sp == std::string::npos) {
            throw IoError("model header: malformed line '" + line + "'");
        }
        std::string key = line.substr(0, sp);
        std::string val = line.substr(sp + 1);
        auto as_u64 = [&](const std::string& s) {
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) {
                throw IoError("model header: bad integer in '" + line + "'");
            }
            return v;
        };
        auto as_double = [&](const std::string& s) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) {
                throw IoError("model header: bad number in '" + line + "'");
            }
            return v;
        };
        if (key == "encoding") {
            if (val == "decimal") {
                enc = Encoding::decimal;
            } else if (val == "binary") {
                enc = Encoding::binary;
            } else {
                throw IoError("model header: unknown encoding '" + val + "'");
            }
        } else if (key == "input_dim") {
            n = as_u64(val);
        } else if (key == "hidden_dim") {
            d = as_u64(val);
        } else if (key == "dist") {
            dist = dist_from_name(val);
        } else if (key == "sigma") {
            sigma = as_double(val);
        } else if (key == "seed") {
            seed = as_u64(val);
        } else if (key == "quantile_level") {
            quantile_level = as_double(val);
        } else if (key == "sample_size") {
            sample_size = as_u64(val);
        } else if (key == "source_seed") {
            source_seed = as_u64(val);
        } else if (key == "global_mean") {
            global_mean = as_double(val);
        } else if (key == "dead_in_denominator") {
            dead_in_denominator = as_u64(val) != 0;
        } else if (key == "payload_bytes") {
            payload_bytes = as_u64(val);
        } else if (key == "checksum") {
            checksum_hex = val;
        } else {
            throw IoError("model header: unknown key '" + key + "'");
        }
    }
    if (n == 0 || d == 0) throw IoError("model header: missing dimensions");
    if (checksum_hex.size() != 16) throw IoError("model header: missing checksum");

    std::string payload = blob.substr(pos);
    if (payload.size() != payload_bytes) {
        throw IoError("model payload: expected " + std::to_string(payload_bytes) +
                      " bytes, found " + std::to_string(payload.size()) +
                      " (file truncated or padded)");
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    if (checksum_hex != hex) {
        throw IoError("model payload: checksum mismatch");
    }

    PayloadReader rd(payload, enc);
    Matrix rows(d, n);
    for (double& x : rows.data) x = rd.next_double();

    Approximator m;
    m.tau.taus.resize(d);
    for (double& x : m.tau.taus) x = rd.next_double();
    m.readout.resize(d);
    for (double& x : m.readout) x = rd.next_double();
    m.counts.resize(d);
    for (std::uint64_t& c : m.counts) c = rd.next_u64();
    m.dead_mask.resize(d);
    for (std::uint8_t& b : m.dead_mask) {
        b = rd.next_byte();
        if (b > 1) throw IoError("model payload: dead mask byte out of range");
    }
    if (enc == Encoding::binary) rd.finish();

    m.W = projection_from_rows(std::move(rows), dist, sigma, seed);
    m.tau.quantile_level = quantile_level;
    m.tau.sample_size = sample_size;
    m.tau.source_seed = source_seed;
    m.global_mean = global_mean;
    m.dead_in_denominator = dead_in_denominator;
    return m;
}

std::string describe_model(const Approximator& m) {
    const std::size_t d = m.hidden_dim();
    std::size_t dead = 0;
    for (std::uint8_t b : m.dead_mask) dead += b;
    const auto k = static_cast<std::size_t>(
        std::llround(static_cast<double>(d) * (1.0 - m.tau.quantile_level)));
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%zu -> %zu units, %s rows (seed %llu), target sparsity k=%zu "
                  "(quantile %.6g over %zu samples), %zu dead, global mean %.6g",
                  m.input_dim(), d, dist_name(m.W.dist).c_str(),
                  static_cast<unsigned long long>(m.W.seed), k,
                  m.tau.quantile_level, m.tau.sample_size, dead, m.global_mean);
    return buf;
}

}  // namespace eas
