#include "plap/field_io.hpp"

#include <bit>
#include <fstream>

#include <json.hpp>

namespace plap {

static_assert(std::endian::native == std::endian::little,
              "pbf files are little-endian; byte swapping is not implemented");

namespace {

nlohmann::json mask_to_json(const DomainMask& mask) {
    nlohmann::json j;
    switch (mask.kind) {
        case MaskKind::Ball:
            j["kind"] = "ball";
            j["radius"] = mask.radius;
            break;
        case MaskKind::Box:
            j["kind"] = "box";
            break;
        case MaskKind::HalfSpaceSlab:
            j["kind"] = "half_space_slab";
            j["normal"] = mask.normal;
            j["offset"] = mask.offset;
            break;
    }
    return j;
}

DomainMask mask_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ball") return DomainMask::ball(j.at("radius").get<double>());
    if (kind == "box") return DomainMask::box();
    if (kind == "half_space_slab")
        return DomainMask::half_space_slab(j.at("normal").get<Point>(),
                                           j.at("offset").get<double>());
    throw std::invalid_argument("pbf: unknown mask kind '" + kind + "'");
}

}  // namespace

void write_field_pbf(const Field& field, const std::string& path) {
    const Grid& g = field.grid();
    nlohmann::json header;
    header["format"] = "pbf-1";
    header["dim"] = g.dim();
    header["nodes_per_axis"] = g.nodes_per_axis();
    header["half_extent"] = g.half_extent();
    header["mask"] = mask_to_json(g.mask());
    header["encoding"] = "float64-le";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pbf: cannot open '" + path + "' for writing");
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.values().size() * sizeof(double)));
    if (!out) throw std::runtime_error("pbf: write failed for '" + path + "'");
}

Field read_field_pbf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pbf: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("pbf: missing header in '" + path + "'");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("pbf: bad header in '" + path + "': " + e.what());
    }
    require(header.at("format").get<std::string>() == "pbf-1", "pbf: unsupported format");
    require(header.at("encoding").get<std::string>() == "float64-le", "pbf: unsupported encoding");
    auto grid = make_grid(header.at("dim").get<int>(), header.at("nodes_per_axis").get<int>(),
                          header.at("half_extent").get<double>(),
                          mask_from_json(header.at("mask")));
    Field field(grid);
    in.read(reinterpret_cast<char*>(field.values().data()),
            static_cast<std::streamsize>(field.values().size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(field.values().size() * sizeof(double)))
        throw std::runtime_error("pbf: truncated value array in '" + path + "'");
    field.check_finite("pbf field");
    return field;
}

void write_field_csv(const Field& field, const std::string& path) {
    const Grid& g = field.grid();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    for (int k = 0; k < g.dim(); ++k) out << 'x' << k << ',';
    out << "value\n";
    int multi[kMaxDim];
    double x[kMaxDim];
    for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
        g.unflatten(i, multi);
        g.node_point(multi, x);
        for (int k = 0; k < g.dim(); ++k) out << format_double(x[k]) << ',';
        out << format_double(field[i]) << '\n';
    }
}

}  // namespace plap
