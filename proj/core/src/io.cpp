#include "cpd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpd/version.hpp"

namespace cpd {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

nlohmann::ordered_json metadata_json(const Metadata& md) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [key, value] : md) {
        j[key] = value;
    }
    j["version"] = kGitDescribe;
    return j;
}

void write_json_doc(const nlohmann::ordered_json& doc, const std::string& path) {
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

nlohmann::ordered_json convergence_json(const ConvergenceReport& rep) {
    nlohmann::ordered_json j;
    j["scheme"] = scheme_name(rep.scheme);
    j["t_end"] = rep.t_end;
    j["k_values"] = rep.k_values;
    j["stepsizes"] = rep.stepsizes;
    j["errors"] = rep.errors;
    j["fitted_order"] = rep.fitted_order;  // NaN serializes as null
    j["exact_regime"] = rep.exact_regime;
    j["ref_rtol"] = rep.ref_rtol;
    j["ref_atol"] = rep.ref_atol;
    j["metadata"] = metadata_json(rep.metadata);
    return j;
}

}  // namespace

void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const auto& [key, value] : rec.metadata) {
        out << "# " << key << " = " << value << '\n';
    }
    out << "# negative_r_half = " << rec.negative_r_half << '\n';
    out << "# version = " << kGitDescribe << '\n';
    if (!rec.error.empty()) {
        out << "# error = " << rec.error << '\n';
    }
    out << "t,x1,x2,x3,v1,v2,v3,aux,H,modified_energy,rel_energy_err\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const ParticleState& ps = rec.states[i];
        out << fmt17(rec.times[i]) << ',' << fmt17(ps.x.x) << ',' << fmt17(ps.x.y) << ','
            << fmt17(ps.x.z) << ',' << fmt17(ps.v.x) << ',' << fmt17(ps.v.y) << ','
            << fmt17(ps.v.z) << ',' << fmt17(rec.aux[i]) << ','
            << fmt17(rec.physical_energy[i]) << ',' << fmt17(rec.modified_energy[i]) << ','
            << fmt17(rec.relative_energy_error[i]) << '\n';
    }
    finish(out, path);
}

TrajectoryRecord read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    TrajectoryRecord rec;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                std::string value = line.substr(eq + 1);
                auto trim = [](std::string& s) {
                    const auto a = s.find_first_not_of(' ');
                    const auto b = s.find_last_not_of(' ');
                    s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
                };
                trim(key);
                trim(value);
                if (key == "error") {
                    rec.error = value;
                } else {
                    rec.metadata.emplace_back(key, value);
                }
            }
            continue;
        }
        if (!header_seen) {  // column header
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string cell;
        std::array<double, 11> vals{};
        for (int i = 0; i < 11; ++i) {
            if (!std::getline(ss, cell, ',')) {
                throw IoError("malformed CSV row in '" + path + "'");
            }
            vals[i] = std::strtod(cell.c_str(), nullptr);
        }
        rec.times.push_back(vals[0]);
        rec.states.push_back({{vals[1], vals[2], vals[3]}, {vals[4], vals[5], vals[6]}});
        rec.aux.push_back(vals[7]);
        rec.physical_energy.push_back(vals[8]);
        rec.modified_energy.push_back(vals[9]);
        rec.relative_energy_error.push_back(vals[10]);
    }
    return rec;
}

void write_trajectory_json(const TrajectoryRecord& rec, const std::string& path) {
    nlohmann::ordered_json j;
    j["scheme"] = scheme_name(rec.scheme);
    j["h"] = rec.h;
    j["T"] = rec.T_actual;
    j["t"] = rec.times;
    auto components = [&rec](auto&& get) {
        std::vector<double> out;
        out.reserve(rec.states.size());
        for (const ParticleState& ps : rec.states) out.push_back(get(ps));
        return out;
    };
    j["x1"] = components([](const ParticleState& p) { return p.x.x; });
    j["x2"] = components([](const ParticleState& p) { return p.x.y; });
    j["x3"] = components([](const ParticleState& p) { return p.x.z; });
    j["v1"] = components([](const ParticleState& p) { return p.v.x; });
    j["v2"] = components([](const ParticleState& p) { return p.v.y; });
    j["v3"] = components([](const ParticleState& p) { return p.v.z; });
    j["aux"] = rec.aux;
    j["H"] = rec.physical_energy;
    j["modified_energy"] = rec.modified_energy;
    j["rel_energy_err"] = rec.relative_energy_error;
    j["negative_r_half"] = rec.negative_r_half;
    if (!rec.error.empty()) {
        j["error"] = rec.error;
    }
    j["metadata"] = metadata_json(rec.metadata);
    write_json_doc(j, path);
}

void write_report_json(const ConvergenceReport& rep, const std::string& path) {
    write_json_doc(convergence_json(rep), path);
}

void write_report_json(const std::vector<ConvergenceReport>& reports,
                       const std::string& path) {
    nlohmann::ordered_json j;
    j["cells"] = nlohmann::ordered_json::array();
    for (const ConvergenceReport& rep : reports) {
        j["cells"].push_back(convergence_json(rep));
    }
    j["version"] = kGitDescribe;
    write_json_doc(j, path);
}

void write_report_json(const TimingReport& rep, const std::string& path) {
    nlohmann::ordered_json j;
    j["schemes"] = {scheme_name(rep.schemes[0]), scheme_name(rep.schemes[1])};
    j["eps_values"] = rep.eps_values;
    j["stepsizes"] = rep.stepsizes;
    j["repetitions"] = rep.repetitions;
    j["T"] = rep.T;
    j["cells"] = nlohmann::ordered_json::array();
    for (const TimingCell& cell : rep.cells) {
        nlohmann::ordered_json c;
        c["scheme"] = scheme_name(cell.scheme);
        c["eps"] = cell.eps;
        c["h"] = cell.h;
        c["wall_seconds"] = cell.wall_seconds;
        c["median_seconds"] = cell.median_seconds;
        c["deterministic"] = cell.deterministic;
        j["cells"].push_back(std::move(c));
    }
    j["metadata"] = metadata_json(rep.metadata);
    write_json_doc(j, path);
}

}  // namespace cpd
