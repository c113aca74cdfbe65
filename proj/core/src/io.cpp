#include "roadfield/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "roadfield/errors.hpp"

namespace roadfield {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Line cursor over a text blob; skips blanks and '#' comments, tracks the
/// 1-based line number for error messages.
class LineReader {
public:
    LineReader(const std::string& text, std::string origin)
        : in_(text), origin_(std::move(origin)) {}

    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_;
            std::string s = trim(raw);
            if (s.empty() || s[0] == '#') continue;
            out = s;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw IoError("io", "parse", origin_ + ":" + std::to_string(line_) + ": " + msg);
    }

    std::string require(const std::string& what) {
        std::string s;
        if (!next(s)) fail("unexpected end of file, expected " + what);
        return s;
    }

private:
    std::istringstream in_;
    std::string origin_;
    int line_ = 0;
};

long long to_int(LineReader& r, const std::string& tok) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("junk");
        return v;
    } catch (const std::exception&) {
        r.fail("expected an integer, got '" + tok + "'");
    }
}

double to_double(LineReader& r, const std::string& tok) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("junk");
        return v;
    } catch (const std::exception&) {
        r.fail("expected a number, got '" + tok + "'");
    }
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

/// Reads a `name count` header line and returns count.
long long read_header(LineReader& r, const std::string& name) {
    const std::string line = r.require("'" + name + " N'");
    const auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != name) {
        r.fail("expected '" + name + " N', got '" + line + "'");
    }
    const long long n = to_int(r, toks[1]);
    if (n < 0) r.fail(name + " count must be nonnegative");
    return n;
}

std::string slurp(const std::string& path, const std::string& op) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("io", op, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& data, const std::string& op) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("io", op, "cannot open '" + path + "' for writing");
    out << data;
    out.flush();
    if (!out) throw IoError("io", op, "write failed on '" + path + "'");
}

} // namespace

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // snprintf honors the C locale here; the library never calls setlocale,
    // so the decimal separator is '.'.
    return buf;
}

RoadNetwork parse_network(const std::string& text, const std::string& origin) {
    LineReader r(text, origin);
    RoadNetwork net;
    const long long nv = read_header(r, "vertices");
    net.vertices.reserve(static_cast<std::size_t>(nv));
    net.boundary_vertex_flags.reserve(static_cast<std::size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        const auto toks = split_ws(r.require("'x y boundary_flag'"));
        if (toks.size() != 3) r.fail("expected 'x y boundary_flag'");
        net.vertices.push_back({to_double(r, toks[0]), to_double(r, toks[1])});
        const long long flag = to_int(r, toks[2]);
        if (flag != 0 && flag != 1) r.fail("boundary flag must be 0 or 1");
        net.boundary_vertex_flags.push_back(static_cast<std::uint8_t>(flag));
    }
    const long long ne = read_header(r, "edges");
    net.edges.reserve(static_cast<std::size_t>(ne));
    for (long long e = 0; e < ne; ++e) {
        const auto toks = split_ws(r.require("'i j'"));
        if (toks.size() != 2) r.fail("expected 'i j'");
        const long long i = to_int(r, toks[0]);
        const long long j = to_int(r, toks[1]);
        if (i < 0 || i >= nv || j < 0 || j >= nv) r.fail("vertex index out of range");
        net.edges.push_back({static_cast<int>(i), static_cast<int>(j)});
    }
    std::string extra;
    if (r.next(extra)) r.fail("trailing content '" + extra + "'");
    return net;
}

RoadNetwork read_network(const std::string& path) {
    return parse_network(slurp(path, "read_network"), path);
}

std::string serialize_network(const RoadNetwork& net) {
    std::ostringstream out;
    out << "vertices " << net.vertices.size() << "\n";
    for (std::size_t i = 0; i < net.vertices.size(); ++i) {
        const int flag = i < net.boundary_vertex_flags.size() ? net.boundary_vertex_flags[i] : 0;
        out << format_float(net.vertices[i].x) << " " << format_float(net.vertices[i].y) << " "
            << flag << "\n";
    }
    out << "edges " << net.edges.size() << "\n";
    for (const auto& e : net.edges) out << e[0] << " " << e[1] << "\n";
    return out.str();
}

void write_network(const RoadNetwork& net, const std::string& path) {
    spill(path, serialize_network(net), "write_network");
}

DomainGeometry parse_domain(const std::string& text, const std::string& origin) {
    LineReader r(text, origin);
    DomainGeometry dom;
    const long long n = read_header(r, "polygon");
    if (n < 3) r.fail("polygon needs at least 3 vertices");
    dom.boundary.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const auto toks = split_ws(r.require("'x y'"));
        if (toks.size() != 2) r.fail("expected 'x y'");
        dom.boundary.push_back({to_double(r, toks[0]), to_double(r, toks[1])});
    }
    std::string extra;
    if (r.next(extra)) r.fail("trailing content '" + extra + "'");
    return dom;
}

DomainGeometry read_domain(const std::string& path) {
    return parse_domain(slurp(path, "read_domain"), path);
}

std::string serialize_domain(const DomainGeometry& domain) {
    std::ostringstream out;
    out << "polygon " << domain.boundary.size() << "\n";
    for (const auto& p : domain.boundary) {
        out << format_float(p.x) << " " << format_float(p.y) << "\n";
    }
    return out.str();
}

void write_domain(const DomainGeometry& domain, const std::string& path) {
    spill(path, serialize_domain(domain), "write_domain");
}

std::string serialize_mesh(const Mesh& mesh) {
    std::ostringstream out;
    out << "vertices " << mesh.vertices.size() << "\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        out << format_float(mesh.vertices[i].x) << " " << format_float(mesh.vertices[i].y) << " "
            << static_cast<int>(mesh.markers[i]) << "\n";
    }
    out << "triangles " << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "road_edges " << mesh.road_edges.size() << "\n";
    for (const auto& e : mesh.road_edges) {
        out << e.a << " " << e.b << " " << e.parent_edge << "\n";
    }
    return out.str();
}

void write_mesh(const Mesh& mesh, const std::string& path) {
    spill(path, serialize_mesh(mesh), "write_mesh");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out << ",";
        out << header[c];
    }
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw IoError("io", "write_csv",
                          "row width " + std::to_string(row.size()) + " does not match header " +
                              std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            out << row[c];
        }
        out << "\n";
    }
    spill(path, out.str(), "write_csv");
}

std::string serialize_matrix(const SpMat& m) {
    if (m.rows() != m.cols()) {
        throw IoError("io", "serialize_matrix", "matrix is not square");
    }
    std::ostringstream out;
    out << "symmetric " << m.rows() << " " << m.nonZeros() << "\n";
    for (int outer = 0; outer < m.outerSize(); ++outer) {
        for (SpMat::InnerIterator it(m, outer); it; ++it) {
            out << it.row() << " " << it.col() << " " << format_float(it.value()) << "\n";
        }
    }
    return out.str();
}

void write_matrix(const SpMat& m, const std::string& path) {
    spill(path, serialize_matrix(m), "write_matrix");
}

void write_vtk(const Mesh& mesh, const DofMaps& dofs, const Vec& state, double time,
               const std::string& path) {
    if (state.size() != dofs.n_total()) {
        throw IoError("io", "write_vtk", "state size does not match dof count");
    }
    const std::size_t nv = mesh.vertices.size();
    std::vector<double> v(nv, 0.0);
    std::vector<double> u(nv, 0.0);
    for (std::size_t i = 0; i < nv; ++i) {
        const int fd = dofs.field_dof[i];
        if (fd >= 0) v[i] = state[fd];
        const int rd = dofs.road_dof[i];
        if (rd >= 0) u[i] = state[dofs.n_field() + rd];
    }

    std::ostringstream out;
    out << "# vtk DataFile Version 3.0\n";
    out << "roadfield state t=" << format_float(time) << "\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& p : mesh.vertices) {
        out << format_float(p.x) << " " << format_float(p.y) << " 0\n";
    }
    const std::size_t ncells = mesh.triangles.size() + mesh.road_edges.size();
    const std::size_t listlen = 4 * mesh.triangles.size() + 3 * mesh.road_edges.size();
    out << "CELLS " << ncells << " " << listlen << "\n";
    for (const auto& t : mesh.triangles) {
        out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
    for (const auto& e : mesh.road_edges) out << "2 " << e.a << " " << e.b << "\n";
    out << "CELL_TYPES " << ncells << "\n";
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out << "5\n";
    for (std::size_t i = 0; i < mesh.road_edges.size(); ++i) out << "3\n";
    out << "POINT_DATA " << nv << "\n";
    out << "SCALARS v double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out << format_float(x) << "\n";
    out << "SCALARS u double 1\nLOOKUP_TABLE default\n";
    for (double x : u) out << format_float(x) << "\n";
    spill(path, out.str(), "write_vtk");
}

std::vector<std::array<double, 2>> read_nodal_values(const std::string& path, int expected) {
    LineReader r(slurp(path, "read_nodal_values"), path);
    const long long n = read_header(r, "values");
    if (n != expected) {
        r.fail("expected " + std::to_string(expected) + " value rows (one per mesh vertex), got " +
               std::to_string(n));
    }
    std::vector<std::array<double, 2>> vals;
    vals.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const auto toks = split_ws(r.require("'v u'"));
        if (toks.size() != 2) r.fail("expected 'v u'");
        vals.push_back({to_double(r, toks[0]), to_double(r, toks[1])});
    }
    return vals;
}

namespace {

double spec_double(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("io", "parse_family_spec",
                          "key '" + key + "' needs a number, got '" + v + "'", line);
    }
}

long long spec_int(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("io", "parse_family_spec",
                          "key '" + key + "' needs an integer, got '" + v + "'", line);
    }
}

void spec_positive(const std::string& key, double v, int line) {
    if (!(v > 0.0)) {
        throw ConfigError("io", "parse_family_spec", "key '" + key + "' must be positive", line);
    }
}

} // namespace

FamilySpecFile parse_family_spec(const std::string& text) {
    FamilySpecFile out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    std::set<std::string> seen;
    const std::set<std::string> sections = {"domain", "params", "search"};
    const std::set<std::string> repeatable = {"search.require", "search.candidate"};
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("io", "parse_family_spec", "unterminated section header", line);
            }
            section = trim(s.substr(1, s.size() - 2));
            if (!sections.count(section)) {
                throw ConfigError("io", "parse_family_spec", "unknown section '" + section + "'",
                                  line);
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("io", "parse_family_spec", "expected 'key = value'", line);
        }
        if (section.empty()) {
            throw ConfigError("io", "parse_family_spec", "key outside any section", line);
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const std::string qual = section + "." + key;
        if (!repeatable.count(qual) && !seen.insert(qual).second) {
            throw ConfigError("io", "parse_family_spec", "duplicate key '" + qual + "'", line);
        }

        RoadFamilySpec& sp = out.spec;
        if (qual == "domain.file") {
            out.domain_file = value;
        } else if (qual == "params.a") {
            sp.params.a = spec_double(key, value, line);
            spec_positive(qual, sp.params.a, line);
        } else if (qual == "params.b") {
            sp.params.b = spec_double(key, value, line);
            spec_positive(qual, sp.params.b, line);
        } else if (qual == "params.mu") {
            sp.params.mu = spec_double(key, value, line);
            spec_positive(qual, sp.params.mu, line);
        } else if (qual == "params.nu") {
            sp.params.nu = spec_double(key, value, line);
            spec_positive(qual, sp.params.nu, line);
        } else if (qual == "params.seed") {
            const long long v = spec_int(key, value, line);
            if (v < 0) {
                throw ConfigError("io", "parse_family_spec", "seed must be nonnegative", line);
            }
            sp.seed = static_cast<std::uint64_t>(v);
        } else if (qual == "params.band") {
            sp.band = spec_double(key, value, line);
            if (sp.band < 0.0) {
                throw ConfigError("io", "parse_family_spec", "band must be nonnegative", line);
            }
        } else if (qual == "search.family") {
            try {
                sp.family = road_family_from_string(value);
            } catch (const Error& e) {
                throw ConfigError("io", "parse_family_spec", e.what(), line);
            }
        } else if (qual == "search.budget") {
            sp.budget = spec_double(key, value, line);
            spec_positive(qual, sp.budget, line);
        } else if (qual == "search.min_length") {
            sp.min_length = spec_double(key, value, line);
            if (sp.min_length < 0.0) {
                throw ConfigError("io", "parse_family_spec", "min_length must be nonnegative",
                                  line);
            }
        } else if (qual == "search.grid") {
            const long long v = spec_int(key, value, line);
            if (v < 2) {
                throw ConfigError("io", "parse_family_spec", "grid must be at least 2", line);
            }
            sp.grid = static_cast<int>(v);
        } else if (qual == "search.fine_factor") {
            const long long v = spec_int(key, value, line);
            if (v < 1) {
                throw ConfigError("io", "parse_family_spec", "fine_factor must be at least 1",
                                  line);
            }
            sp.fine_factor = static_cast<int>(v);
        } else if (qual == "search.h") {
            sp.h = spec_double(key, value, line);
            spec_positive(qual, sp.h, line);
        } else if (qual == "search.min_angle") {
            const double v = spec_double(key, value, line);
            if (v < 0.0 || v >= 60.0) {
                throw ConfigError("io", "parse_family_spec", "min_angle must lie in [0, 60)",
                                  line);
            }
            sp.mesh_options.min_angle_deg = v;
        } else if (qual == "search.eigen_k") {
            const long long v = spec_int(key, value, line);
            if (v < 1) {
                throw ConfigError("io", "parse_family_spec", "eigen_k must be at least 1", line);
            }
            sp.eigen_k = static_cast<int>(v);
        } else if (qual == "search.eigen_tol") {
            sp.eigen_tol = spec_double(key, value, line);
            spec_positive(qual, sp.eigen_tol, line);
        } else if (qual == "search.corner_clearance") {
            sp.corner_clearance = spec_double(key, value, line);
            if (sp.corner_clearance < 0.0) {
                throw ConfigError("io", "parse_family_spec",
                                  "corner_clearance must be nonnegative", line);
            }
        } else if (qual == "search.local_iterations") {
            const long long v = spec_int(key, value, line);
            if (v < 0) {
                throw ConfigError("io", "parse_family_spec",
                                  "local_iterations must be nonnegative", line);
            }
            sp.local_iterations = static_cast<int>(v);
        } else if (qual == "search.required_tol") {
            sp.required_tol = spec_double(key, value, line);
            spec_positive(qual, sp.required_tol, line);
        } else if (qual == "search.require") {
            const auto toks = split_ws(value);
            if (toks.size() != 2) {
                throw ConfigError("io", "parse_family_spec", "require takes 'x y'", line);
            }
            sp.required_points.push_back(
                {spec_double(key, toks[0], line), spec_double(key, toks[1], line)});
        } else if (qual == "search.candidate") {
            out.candidate_files.push_back(value);
        } else {
            throw ConfigError("io", "parse_family_spec", "unknown key '" + qual + "'", line);
        }
    }
    if (out.domain_file.empty()) {
        throw ConfigError("io", "parse_family_spec", "missing required key 'domain.file'");
    }
    if (out.spec.family == RoadFamily::UserList && out.candidate_files.empty()) {
        throw ConfigError("io", "parse_family_spec",
                          "family user-list needs at least one 'candidate = <netfile>'");
    }
    return out;
}

RoadFamilySpec load_family_spec(const std::string& path) {
    FamilySpecFile file = parse_family_spec(slurp(path, "load_family_spec"));
    RoadFamilySpec spec = std::move(file.spec);
    spec.domain = read_domain(file.domain_file);
    for (const auto& cand : file.candidate_files) {
        spec.user_candidates.push_back(read_network(cand));
    }
    return spec;
}

} // namespace roadfield
