// Command-line front end: word problem and plane projection, tile-set
// enumeration, orbit colorings, patch verification, finite-region
// tileability, affine-system compilation, and graph rendering.
//
// Exit codes: 0 success (solve: SAT, verify: valid), 1 solve UNSAT or
// verify violations, 2 solve budget exhausted, 3 usage or input errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bstiles/coloring.hpp"
#include "bstiles/dynsys.hpp"
#include "bstiles/group.hpp"
#include "bstiles/projection.hpp"
#include "bstiles/rational.hpp"
#include "bstiles/reduction.hpp"
#include "bstiles/render.hpp"
#include "bstiles/solver.hpp"
#include "bstiles/tiles.hpp"

namespace {

using namespace bstiles;

constexpr int kExitError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + out_path + "' for writing");
    out << text;
}

struct RegionSpec {
    std::string text = "ball:2";

    Region build(GroupParams p) const {
        auto colon = text.find(':');
        std::string kind = text.substr(0, colon);
        std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
        if (kind == "ball") {
            int r = 0;
            try {
                r = std::stoi(args);
            } catch (...) {
                throw ParseError("region '" + text + "': expected ball:R");
            }
            if (r < 0) throw ParseError("ball radius must be non-negative");
            return region_ball(p, r);
        }
        if (kind == "slab") {
            auto comma = args.find(',');
            if (comma == std::string::npos)
                throw ParseError("region '" + text + "': expected slab:W,L");
            try {
                int w = std::stoi(args.substr(0, comma));
                int l = std::stoi(args.substr(comma + 1));
                return region_slab(p, w, l);
            } catch (const ValidationError&) {
                throw;
            } catch (...) {
                throw ParseError("region '" + text + "': expected slab:W,L");
            }
        }
        throw ParseError("region '" + text + "': expected ball:R or slab:W,L");
    }
};

struct OrbitSpec {
    Rational x0 = Rational(5, 4);
    std::optional<long long> back;
    std::optional<long long> fwd;
    BackwardPolicy policy = BackwardPolicy::PreferHalving;

    static OrbitSpec parse(const std::string& text) {
        OrbitSpec spec;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ',')) {
            auto eq = part.find('=');
            if (eq == std::string::npos)
                throw ParseError("orbit '" + text + "': expected key=value parts");
            std::string key = part.substr(0, eq);
            std::string value = part.substr(eq + 1);
            if (key == "x0") {
                spec.x0 = parse_rational(value);
            } else if (key == "back") {
                spec.back = std::stoll(value);
            } else if (key == "fwd") {
                spec.fwd = std::stoll(value);
            } else if (key == "policy") {
                if (value == "prefer-halving")
                    spec.policy = BackwardPolicy::PreferHalving;
                else if (value == "prefer-three-halves")
                    spec.policy = BackwardPolicy::PreferThreeHalves;
                else if (value == "fail-if-ambiguous")
                    spec.policy = BackwardPolicy::FailIfAmbiguous;
                else
                    throw ParseError("unknown backward policy '" + value + "'");
            } else {
                throw ParseError("orbit '" + text + "': unknown key '" + key + "'");
            }
        }
        return spec;
    }

    // Window sized to cover every height of the region, plus one level
    // above so that b-edge multipliers are defined everywhere.
    Orbit build(GroupParams p, const Region& region) const {
        long long min_beta = 0, max_beta = 0;
        for (const auto& g : region.elements) {
            long long beta = project(p, g).beta;
            min_beta = std::min(min_beta, beta);
            max_beta = std::max(max_beta, beta);
        }
        long long b = back.value_or(std::max<long long>(0, -min_beta) + 1);
        long long f = fwd.value_or(std::max<long long>(0, max_beta));
        return orbit_window(kari_map(), x0, b, f, policy);
    }
};

TileSet load_tileset(const std::string& file, const std::string& preset) {
    if (!file.empty() && !preset.empty())
        throw ParseError("give either --tileset or --preset, not both");
    if (!file.empty()) return parse_tileset(read_file(file));
    if (preset == "kari32" || preset.empty()) return kari_bs32_tileset();
    if (preset == "kari32-q2") return enumerate_times2();
    if (preset == "kari32-q23") return enumerate_times23();
    throw ParseError("unknown preset '" + preset + "'");
}

bool tileset_file_is_vector(const nlohmann::json& j) {
    const auto& tiles = j.at("tiles");
    if (tiles.empty()) return false;
    return tiles[0].at("left").is_array();
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Sat: return "SAT";
        case SolveStatus::Unsat: return "UNSAT";
        default: return "BUDGET_EXHAUSTED";
    }
}

int status_exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Sat: return 0;
        case SolveStatus::Unsat: return 1;
        default: return 2;
    }
}

int run(int argc, char** argv) {
    CLI::App app{"exact tilings on Baumslag-Solitar groups"};
    app.require_subcommand(1);

    int m = 3, n = 2;
    bool json_out = false;
    std::string out_path;
    app.add_option("-m", m, "first group order (a^m b = b a^n)")->capture_default_str();
    app.add_option("-n", n, "second group order")->capture_default_str();
    app.add_flag("--json", json_out, "machine-readable JSON output");
    app.add_option("--out", out_path, "write output to a file instead of stdout");

    // normalize WORD
    auto* cmd_normalize = app.add_subcommand("normalize", "canonical form of a word");
    std::string word_arg;
    cmd_normalize->add_option("word", word_arg, "word over a,A,b,B")->required();

    // project WORD
    auto* cmd_project = app.add_subcommand("project", "plane coordinates of a word");
    std::string project_word;
    cmd_project->add_option("word", project_word, "word over a,A,b,B")->required();

    // tiles enumerate
    auto* cmd_tiles = app.add_subcommand("tiles", "tile-set operations");
    auto* cmd_enum = cmd_tiles->add_subcommand("enumerate", "emit a preset tile set");
    std::string tiles_preset = "kari32";
    bool tiles_count = false;
    cmd_enum->add_option("--preset", tiles_preset,
                         "kari32 | kari32-q2 | kari32-q23")
        ->capture_default_str();
    cmd_enum->add_flag("--count", tiles_count, "print only the number of tiles");

    // gamma
    auto* cmd_gamma = app.add_subcommand("gamma", "color a region from an orbit");
    std::string gamma_region = "slab:18,3";
    std::string gamma_orbit = "x0=5/4";
    bool gamma_general = false;
    cmd_gamma->add_option("--region", gamma_region, "ball:R or slab:W,L")
        ->capture_default_str();
    cmd_gamma->add_option("--orbit", gamma_orbit, "x0=P/Q[,back=B][,fwd=F][,policy=...]")
        ->capture_default_str();
    cmd_gamma->add_flag("--experimental-general", gamma_general,
                        "allow group orders other than (3,2)");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "check a patch against a tile set");
    std::string verify_patch_file, verify_tileset_file, verify_preset;
    cmd_verify->add_option("--patch", verify_patch_file, "patch JSON file")->required();
    cmd_verify->add_option("--tileset", verify_tileset_file, "tile-set JSON file");
    cmd_verify->add_option("--preset", verify_preset, "named tile set");

    // solve
    auto* cmd_solve = app.add_subcommand("solve", "tileability of a finite region");
    std::string solve_region = "ball:2";
    std::string solve_tileset_file, solve_preset;
    std::uint64_t budget = 10'000'000;
    bool deterministic = true;
    bool parallel = false;
    cmd_solve->add_option("--region", solve_region, "ball:R or slab:W,L")
        ->capture_default_str();
    cmd_solve->add_option("--tileset", solve_tileset_file, "tile-set JSON file");
    cmd_solve->add_option("--preset", solve_preset, "named tile set");
    cmd_solve->add_option("--budget", budget, "search node budget")->capture_default_str();
    cmd_solve->add_flag("--deterministic,!--no-deterministic", deterministic,
                        "sequential reproducible search (default)");
    cmd_solve->add_flag("--parallel", parallel,
                        "split the root across threads (needs --no-deterministic)");

    // compile-affine
    auto* cmd_compile = app.add_subcommand("compile-affine",
                                           "compile an affine system into vector tiles");
    std::string system_file;
    long long denom = 0;
    bool compile_count = false;
    cmd_compile->add_option("--system", system_file, "affine system JSON file")->required();
    cmd_compile->add_option("--denom", denom, "carry grid denominator (default: lcm)");
    cmd_compile->add_flag("--count", compile_count, "print only the number of tiles");

    // render
    auto* cmd_render = app.add_subcommand("render", "draw a region or patch");
    std::string render_region, render_patch_file, render_format = "dot";
    cmd_render->add_option("--region", render_region, "ball:R or slab:W,L");
    cmd_render->add_option("--patch", render_patch_file, "patch JSON file");
    cmd_render->add_option("--format", render_format, "dot | svg")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        GroupParams p{m, n};
        require_valid(p);

        if (cmd_normalize->parsed()) {
            NormalForm nf = normalize(p, word_arg);
            if (json_out) {
                nlohmann::json j{{"word", word_arg}, {"normal_form", nf.str()}};
                write_output(out_path, j.dump(2) + "\n");
            } else {
                write_output(out_path, nf.str() + "\n");
            }
            return 0;
        }

        if (cmd_project->parsed()) {
            PlanePoint pt = project(p, parse_word(project_word));
            if (json_out) {
                nlohmann::json j{{"alpha", format_rational(pt.alpha)}, {"beta", pt.beta}};
                write_output(out_path, j.dump(2) + "\n");
            } else {
                write_output(out_path,
                             format_rational(pt.alpha) + " " + std::to_string(pt.beta) + "\n");
            }
            return 0;
        }

        if (cmd_tiles->parsed()) {
            TileSet ts = load_tileset("", tiles_preset);
            if (tiles_count) {
                write_output(out_path, std::to_string(ts.size()) + "\n");
            } else {
                write_output(out_path, serialize_tileset(ts));
            }
            return 0;
        }

        if (cmd_gamma->parsed()) {
            Region region = RegionSpec{gamma_region}.build(p);
            OrbitSpec ospec = OrbitSpec::parse(gamma_orbit);
            Orbit orbit = ospec.build(p, region);
            Patch patch = build_patch(p, orbit, region.elements, {gamma_general});
            write_output(out_path, serialize_patch(patch));
            return 0;
        }

        if (cmd_verify->parsed()) {
            Patch patch = parse_patch(read_file(verify_patch_file));
            TileSet ts = load_tileset(verify_tileset_file, verify_preset);
            VerifyReport report = verify_patch(patch, ts);
            if (json_out) {
                nlohmann::json violations = nlohmann::json::array();
                for (const auto& v : report.violations) violations.push_back(v.anchor);
                nlohmann::json j{{"anchors_checked", report.anchors_checked},
                                 {"violations", std::move(violations)}};
                write_output(out_path, j.dump(2) + "\n");
            } else {
                std::string text = "anchors checked: " +
                                   std::to_string(report.anchors_checked) + "\n";
                for (const auto& v : report.violations)
                    text += "violation at '" + v.anchor + "'\n";
                text += report.ok() ? "valid\n" : "invalid\n";
                write_output(out_path, text);
            }
            return report.ok() ? 0 : 1;
        }

        if (cmd_solve->parsed()) {
            Region region = RegionSpec{solve_region}.build(p);
            SolverConfig cfg;
            cfg.node_budget = budget;
            cfg.deterministic = deterministic;
            cfg.parallel = parallel;

            nlohmann::json tileset_json;
            bool vector_tiles = false;
            if (!solve_tileset_file.empty() && solve_preset.empty()) {
                tileset_json = nlohmann::json::parse(read_file(solve_tileset_file));
                vector_tiles = tileset_file_is_vector(tileset_json);
            }

            SolveStatus status;
            SolveStats stats;
            std::string witness_text;
            if (vector_tiles) {
                VectorTileSet ts = vector_tileset_from_json(tileset_json);
                if (!(ts.group == p))
                    throw ParseError("tile-set group order differs from -m/-n");
                VectorSolveOutcome outcome = solve(region, ts, cfg);
                status = outcome.status;
                stats = outcome.stats;
                if (outcome.witness) witness_text = outcome.witness->dump(2) + "\n";
            } else {
                TileSet ts = load_tileset(solve_tileset_file, solve_preset);
                if (!(ts.group == p))
                    throw ParseError("tile-set group order differs from -m/-n");
                SolveOutcome outcome = solve(region, ts, cfg);
                status = outcome.status;
                stats = outcome.stats;
                if (outcome.witness) witness_text = serialize_patch(*outcome.witness);
            }

            if (json_out) {
                nlohmann::json j{{"status", status_name(status)},
                                 {"nodes", stats.nodes},
                                 {"propagations", stats.propagations}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << status_name(status) << " (nodes " << stats.nodes
                          << ", propagations " << stats.propagations << ")\n";
            }
            if (!out_path.empty() && !witness_text.empty())
                write_output(out_path, witness_text);
            return status_exit_code(status);
        }

        if (cmd_compile->parsed()) {
            AffineSystem sys = parse_affine_system(read_file(system_file));
            long long d = denom > 0 ? denom : default_denominator(sys, p);
            VectorTileSet ts = compile(sys, p, d);
            if (compile_count)
                write_output(out_path, std::to_string(ts.size()) + "\n");
            else
                write_output(out_path, serialize_vector_tileset(ts));
            return 0;
        }

        if (cmd_render->parsed()) {
            if (render_format != "dot" && render_format != "svg")
                throw ParseError("format must be dot or svg");
            std::string text;
            if (!render_patch_file.empty()) {
                Patch patch = parse_patch(read_file(render_patch_file));
                text = render_format == "dot" ? render_dot(patch) : render_svg(patch);
            } else if (!render_region.empty()) {
                Region region = RegionSpec{render_region}.build(p);
                text = render_format == "dot" ? render_dot(p, region.elements)
                                              : render_svg(p, region.elements);
            } else {
                throw ParseError("render needs --region or --patch");
            }
            write_output(out_path, text);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
