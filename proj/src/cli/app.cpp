#include "sslab/cli.hpp"

#include "sslab/errors.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace sslab::cli {

namespace {

std::pair<double, double> parse_pair(const std::string& text, const char* flag)
{
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos)
            throw std::invalid_argument(text);
        std::size_t ua = 0, ub = 0;
        const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
        const double x = std::stod(a, &ua), y = std::stod(b, &ub);
        if (ua != a.size() || ub != b.size())
            throw std::invalid_argument(text);
        return {x, y};
    } catch (const std::exception&) {
        throw DomainError(std::string(flag) + " expects \"a,b\", got '" + text + "'");
    }
}

} // namespace

int run(int argc, const char* const* argv)
{
    RunConfig c;
    std::string alpha, window, xrange, yrange;

    CLI::App app{"Spectral experiments for the Laplacian of a self-similar measure on the half-line", "sslab"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "Flat key=value file; flags override its values");
    app.require_subcommand(1);

    app.add_option("--alpha", alpha, "Scale parameter in (0,1); fractions like 2/3 allowed");
    app.add_option("--blowup", c.blowup, "Blow-up prefix, e.g. 121:tail=1");
    app.add_option("--level", c.level, "Level n of I_<n>");
    app.add_option("--window", window, "Spectral window \"a,b\" with a < b <= 0");
    app.add_option("--tol", c.tol, "Eigenvalue tolerance");
    app.add_option("--max-iter", c.max_iter, "Iteration cap for orbits of the renormalization map");
    app.add_option("--escape-radius", c.escape_radius, "Escape radius for orbits");
    app.add_option("--out", c.out, "Output file (default stdout)");
    app.add_option("--format", c.format, "csv or json");
    app.add_option("--jobs", c.jobs, "Worker threads");
    app.add_option("--seed", c.seed, "Random seed");
    app.add_option("--resolution", c.resolution, "String oracle depth beyond the level");
    app.add_option("--points", c.points, "Grid size for ids");
    app.add_option("--boundary", c.boundary, "neumann or dirichlet");
    app.add_option("--alphas", c.alphas, "Alpha list for dichotomy, fractions allowed");
    app.add_flag("--mirror", c.mirror, "Dichotomy at 1 - alpha with boundaries swapped");
    app.add_option("--xrange", xrange, "Plane x range \"a,b\"");
    app.add_option("--yrange", yrange, "Plane y range \"a,b\"");
    app.add_option("--grid", c.grid, "Plane grid points per axis");
    app.add_flag("--timing", c.timing, "Add per-check seconds to the verify report");
    app.add_flag("--inject-fault", c.inject_fault, "Test hook: corrupt delta in the semiconjugacy check");

    struct Entry {
        const char* name;
        const char* help;
        ResultRecord (*fn)(const RunConfig&);
    };
    const Entry entries[] = {
        {"spectrum", "Labeled eigenvalues of H_<n> against the string oracle", cmd_spectrum},
        {"ids", "Integrated density of states, Lyapunov exponent and class on a grid", cmd_ids},
        {"plane", "Green function and geometry of the renormalization map on a grid", cmd_plane},
        {"verify", "Run the invariant suite", cmd_verify},
        {"dichotomy", "Norm ladder verdicts by boundary condition", cmd_dichotomy},
    };
    for (const auto& e : entries)
        app.add_subcommand(e.name, e.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!alpha.empty()) {
            const auto v = parse_alpha_list(alpha);
            if (v.size() != 1)
                throw DomainError("--alpha takes a single value");
            c.alpha = v.front();
        }
        if (!window.empty())
            std::tie(c.window_lo, c.window_hi) = parse_pair(window, "--window");
        if (!xrange.empty())
            std::tie(c.x_lo, c.x_hi) = parse_pair(xrange, "--xrange");
        if (!yrange.empty())
            std::tie(c.y_lo, c.y_hi) = parse_pair(yrange, "--yrange");

        const Entry* chosen = nullptr;
        for (const auto& e : entries)
            if (app.got_subcommand(e.name))
                chosen = &e;
        const ResultRecord r = chosen->fn(c);
        for (const auto& d : r.diagnostics)
            std::fprintf(stderr, "%s\n", d.c_str());
        const std::string text = render(r);
        if (c.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(c.out, std::ios::binary);
            if (!(f << text)) {
                std::fprintf(stderr, "sslab: cannot write %s\n", c.out.c_str());
                return 2;
            }
        }
        return r.check_failed ? 1 : 0;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "sslab: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        // LevelMismatchError and PreconditionError derive from invalid_argument
        std::fprintf(stderr, "sslab: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sslab: %s\n", e.what());
        return 3;
    }
}

} // namespace sslab::cli
