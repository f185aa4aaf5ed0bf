// End-to-end tests of the command-line tool: spawns the real binary and
// checks outputs, exit codes, and the cache file contract.
// argv: <cli-binary> <data-dir>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "ok" : "FAIL") << "\t" << what << "\n";
    if (!ok) ++failures;
}

struct RunResult {
    int code;
    std::string out;
};

RunResult run(const std::string& cmd) {
    std::string full = cmd + " 2>&1";
    FILE* p = popen(full.c_str(), "r");
    if (!p) return {-1, ""};
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: test_cli <binary> <data-dir>\n";
        return 2;
    }
    std::string cli = argv[1];
    std::string data = argv[2];
    std::string tmp = "/tmp/zetafam_cli_test";
    (void)run("rm -rf " + tmp + " && mkdir -p " + tmp);
    std::string cache = tmp + "/l5.cache";

    // precompute
    auto r = run(cli + " precompute --family " + data + "/legendre_p5.json --n 2 --out " + cache);
    check(r.code == 0, "precompute exits 0");
    check(contains(r.out, "profile"), "precompute prints the profile");
    check(contains(r.out, "cache written"), "precompute reports the cache path");

    // determinism: byte-identical rerun
    auto r2 = run(cli + " precompute --family " + data + "/legendre_p5.json --n 2 --out " + cache + "2");
    check(r2.code == 0, "precompute rerun exits 0");
    check(slurp(cache) == slurp(cache + "2"), "rerun produces a byte-identical cache");

    // zeta at the base point: supersingular Legendre story over F_5 is
    // Y^2 = X^3 - X with 8 points and P = 1 + 2t + 5t^2
    r = run(cli + " zeta --cache " + cache + " --gamma 0");
    check(r.code == 0, "zeta --gamma 0 exits 0");
    check(contains(r.out, "P(t)\t1\t2\t5"), "P(t) = 1 + 2t + 5t^2");
    check(contains(r.out, "count k=1\t8"), "count over F_5 is 8");

    // plain and --json outputs carry identical integers
    auto rj = run(cli + " zeta --cache " + cache + " --gamma 0 --json");
    check(rj.code == 0, "zeta --json exits 0");
    check(contains(rj.out, "\"1\"") && contains(rj.out, "\"2\"") && contains(rj.out, "\"5\""),
          "json contains the same coefficients as decimal strings");
    check(contains(rj.out, "\"8\""), "json contains the same count");

    // singular fiber refusal names the condition
    r = run(cli + " zeta --cache " + cache + " --gamma 1");
    check(r.code == 4, "singular gamma exits 4");
    check(contains(r.out, "singular"), "refusal names the singular-fiber condition");

    // quadratic parameter round trip through verify
    r = run(cli + " verify --cache " + cache +
            " --gamma '{\"psi\": [[2],[0],[1]], \"gamma\": [[0],[1]]}' --kmax 2");
    check(r.code == 0, "verify (degree-2 gamma) exits 0");
    check(contains(r.out, "check k=1\tpass") && contains(r.out, "check k=2\tpass"),
          "verify counts pass");
    check(contains(r.out, "check P(t) vs oracle\tpass"), "verify P(t) passes");

    r = run(cli + " verify --cache " + cache + " --gamma 0 --kmax 0");
    check(r.code == 0 && contains(r.out, "nothing verified"), "kmax = 0 reports nothing verified");

    // corruption: flip one byte in the middle of the cache
    {
        std::string body = slurp(cache);
        body[body.size() / 2] = static_cast<char>(body[body.size() / 2] ^ 0x01);
        std::ofstream out(tmp + "/corrupt.cache", std::ios::binary);
        out << body;
    }
    r = run(cli + " zeta --cache " + tmp + "/corrupt.cache --gamma 0");
    check(r.code == 6, "corrupted cache exits 6");
    check(contains(r.out, "checksum"), "corruption refusal mentions the checksum");

    // family and usage errors
    r = run(cli + " precompute --family " + data + "/bad_singular.json --n 1 --out " + tmp + "/x");
    check(r.code == 3, "singular base curve exits 3");
    r = run(cli + " precompute --family " + tmp + "/missing.json --n 1 --out " + tmp + "/x");
    check(r.code == 6, "missing family file exits 6");
    r = run(cli + " precompute --family " + data + "/legendre_p5.json --n 0 --out " + tmp + "/x");
    check(r.code == 2, "n = 0 exits 2 (usage)");
    r = run(cli + " nonsense");
    check(r.code == 2, "unknown subcommand exits 2");

    // random gamma echoes its seed and is reproducible
    r = run(cli + " zeta --cache " + cache + " --random-gamma 7 --degree 2");
    r2 = run(cli + " zeta --cache " + cache + " --random-gamma 7 --degree 2");
    check(r.code == 0 && contains(r.out, "random seed 7"), "random gamma echoes the seed");
    check(r.out == r2.out, "same seed gives identical output");

    // bench: tab-separated, stages in pipeline order, total >= each stage
    r = run(cli + " bench --family " + data + "/legendre_p3.json --n 1");
    check(r.code == 0, "bench exits 0");
    {
        std::vector<std::string> want{"resultant", "H",     "C",        "inverse", "F(0)",
                                      "F(Gamma)",  "r^M F", "gamma",    "F(gamma)", "norm",
                                      "total"};
        std::istringstream in(r.out);
        std::string line;
        std::size_t idx = 0;
        double total = -1, stage_max = 0;
        bool shape_ok = true;
        while (std::getline(in, line)) {
            auto p1 = line.find('\t');
            auto p2 = line.rfind('\t');
            if (p1 == std::string::npos || p2 <= p1) {
                shape_ok = false;
                break;
            }
            std::string stage = line.substr(p1 + 1, p2 - p1 - 1);
            double sec = std::stod(line.substr(p2 + 1));
            if (idx >= want.size() || stage != want[idx]) {
                shape_ok = false;
                break;
            }
            if (stage == "total")
                total = sec;
            else
                stage_max = std::max(stage_max, sec);
            ++idx;
        }
        check(shape_ok && idx == want.size(), "bench lists all stages in pipeline order");
        check(total >= stage_max, "bench total >= max stage");
    }

    std::cout << (failures ? "FAILED" : "all cli checks passed") << "\n";
    return failures ? 1 : 0;
}
