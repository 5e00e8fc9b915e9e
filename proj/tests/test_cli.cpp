// End-to-end checks of the command-line front end: output shapes, exit
// codes, config/flag precedence.
//
// usage: test_cli <path-to-finsler-cli>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int g_failures = 0;
std::string g_cli;

void check(const std::string& label, bool ok, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", ok ? "ok" : "FAIL", label.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    if (!ok) ++g_failures;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, ""};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> lines;
    std::stringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <finsler-cli>\n");
        return 2;
    }
    g_cli = argv[1];
    const std::string dir = "cli_tmp";
    std::system(("mkdir -p " + dir).c_str());

    {
        RunResult r = run("spaces");
        auto ls = lines_of(r.out);
        check("spaces lists the zoo", r.exit_code == 0 && ls.size() >= 5 &&
                                          r.out.find("heisenberg") != std::string::npos &&
                                          r.out.find("su2") != std::string::npos);
        RunResult d2 = run("spaces --dim 2");
        check("spaces --dim 2 keeps the hyperbolic half-plane",
              d2.exit_code == 0 && d2.out.find("hyperbolic") != std::string::npos &&
                  d2.out.find("heisenberg") == std::string::npos);
        RunResult fb = run("spaces --filter berwald");
        check("spaces --filter berwald mentions riemannian families",
              fb.exit_code == 0 && fb.out.find("riemannian") != std::string::npos);
    }

    {
        RunResult r = run("tensors --space flat3 --y 1,0,0");
        check("flat tensors: identity metric, vanishing symbols",
              r.exit_code == 0 && r.out.find("all zero") != std::string::npos);
        const std::string outfile = dir + "/should_not_exist.csv";
        std::remove(outfile.c_str());
        RunResult bad = run("tensors --space flat3 --y 0,0,0 --out " + outfile);
        std::ifstream f(outfile);
        check("tensors at y=0: exit 2, no output file",
              bad.exit_code == 2 && !f.good());
    }

    {
        RunResult one = run("sphere-field --space heisenberg --samples 1 --seed 3");
        auto ls = lines_of(one.out);
        check("sphere-field with samples=1: header intact, single row",
              one.exit_code == 0 && ls.size() == 3 && ls[0].rfind("# finsler", 0) == 0 &&
                  ls[1].rfind("x1,", 0) == 0,
              "rows=" + std::to_string(ls.size()));
        check("seed recorded in the artifact",
              one.out.find("seed=3") != std::string::npos);

        RunResult big = run("sphere-field --space heisenberg --samples 2000");
        auto rows = lines_of(big.out);
        double min_t = 1e300;
        for (size_t i = 2; i < rows.size(); ++i) {
            const auto pos = rows[i].rfind(',');
            min_t = std::min(min_t, std::stod(rows[i].substr(pos + 1)));
        }
        check("sphere-field min |t| near the oracle zero set",
              big.exit_code == 0 && rows.size() == 2002 && min_t <= 1e-3,
              "min |t| = " + std::to_string(min_t));
    }

    {
        RunResult ok = run("verify --space heisenberg --X 0,0,1");
        check("verify certifies the central direction", ok.exit_code == 0 &&
                                                            ok.out.find("\"certified\": true") !=
                                                                std::string::npos);
        RunResult bad = run("verify --space heisenberg --X 1,0,1");
        check("verify rejects a non-geodesic vector with exit 3",
              bad.exit_code == 3 &&
                  bad.out.find("\"certified\": false") != std::string::npos);
        RunResult flat = run("verify --space flat2 --X 0.6,-0.8");
        check("flat directions always certify", flat.exit_code == 0);
    }

    {
        RunResult r = run("search --space su2 --samples 400 --format json");
        check("su2 search flags all directions geodesic",
              r.exit_code == 0 &&
                  r.out.find("\"all_directions_geodesic\": true") != std::string::npos);
    }

    {
        // algebra-only spec: verify works (uncorroborated), search refuses
        std::ofstream spec(dir + "/heis_algebra.json");
        spec << R"({"family": "custom", "algebra": {"structure_constants":
          [[[0,0,0],[0,0,0],[0,0,0]],
           [[0,0,0],[0,0,0],[0,0,0]],
           [[0,1,0],[-1,0,0],[0,0,0]]]}})";
        spec.close();
        RunResult v = run("verify --space " + dir + "/heis_algebra.json --X 0,0,1");
        check("custom algebra: algebraic verify certifies the center",
              v.exit_code == 0 &&
                  v.out.find("\"uncorroborated\": true") != std::string::npos);
        RunResult s = run("search --space " + dir + "/heis_algebra.json");
        check("custom algebra: chart-level search refused with exit 2",
              s.exit_code == 2);
    }

    {
        std::ofstream cfg(dir + "/run.json");
        cfg << R"({"space": "heisenberg", "samples": 5, "seed": 11})";
        cfg.close();
        RunResult base = run("sphere-field --config " + dir + "/run.json");
        RunResult over = run("sphere-field --config " + dir + "/run.json --samples 3");
        check("config file drives the run",
              base.exit_code == 0 && lines_of(base.out).size() == 7);
        check("command-line flags override the config",
              over.exit_code == 0 && lines_of(over.out).size() == 5);
        std::ofstream badcfg(dir + "/bad.json");
        badcfg << R"({"space": "heisenberg", "samplez": 5})";
        badcfg.close();
        RunResult bad = run("sphere-field --config " + dir + "/bad.json");
        check("unknown config keys rejected", bad.exit_code == 2);
    }

    {
        RunResult r = run("definitely-not-a-command");
        check("usage errors exit with code 1", r.exit_code == 1);
        RunResult missing = run("verify --space heisenberg");
        check("missing required flag exits with code 1", missing.exit_code == 1);
    }

    std::printf("%d failure(s)\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
