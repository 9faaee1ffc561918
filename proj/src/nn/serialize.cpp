#include "mmlab/nn/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mmlab::nn {

namespace {

constexpr const char* kMagic = "mmlab-params";
constexpr int kVersion = 1;

std::string hexfloat(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

[[noreturn]] void bad(const std::string& what) { throw std::runtime_error("parameter file: " + what); }

}  // namespace

void write_params(std::ostream& os, const ParamSet& params)
{
    if (params.values.size() != params.spec.param_count()) throw std::invalid_argument("write_params: length does not match spec");
    os << kMagic << ' ' << kVersion << '\n' << "layers";
    for (int w : params.spec.layers) os << ' ' << w;
    os << '\n' << "count " << params.values.size() << '\n';
    for (double v : params.values) os << hexfloat(v) << '\n';
}

ParamSet read_params(std::istream& is, const std::optional<NetSpec>& expected)
{
    std::string line;
    if (!std::getline(is, line)) bad("empty file");
    {
        std::istringstream hs(line);
        std::string magic;
        int version = 0;
        if (!(hs >> magic >> version) || magic != kMagic) bad("bad header");
        if (version != kVersion) bad("unsupported version " + std::to_string(version));
    }
    ParamSet p;
    if (!std::getline(is, line)) bad("missing layers line");
    {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag != "layers") bad("missing layers line");
        int w = 0;
        while (ls >> w) p.spec.layers.push_back(w);
        if (!ls.eof()) bad("malformed layers line");
    }
    try {
        validate(p.spec);
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    if (expected && !(*expected == p.spec))
        bad("spec mismatch: file has " + describe(p.spec) + ", expected " + describe(*expected));

    std::size_t count = 0;
    if (!std::getline(is, line)) bad("missing count line");
    {
        std::istringstream cs(line);
        std::string tag;
        if (!(cs >> tag >> count) || tag != "count") bad("missing count line");
    }
    if (count != p.spec.param_count()) bad("count does not match layers");
    p.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(is, line)) bad("truncated values");
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || !std::isfinite(v)) bad("bad value at index " + std::to_string(i));
        p.values.push_back(v);
    }
    return p;
}

void save_params(const std::string& path, const ParamSet& params)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_params(os, params);
    if (!os) throw std::runtime_error("failed writing " + path);
}

ParamSet load_params(const std::string& path, const std::optional<NetSpec>& expected)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    try {
        return read_params(is, expected);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace mmlab::nn
