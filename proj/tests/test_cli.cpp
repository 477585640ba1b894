#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "fixtures.hpp"

using namespace pwl;

namespace {

namespace fs = std::filesystem;

struct Run {
    int status = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args)
{
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "pwlmel_cli_test";
    fs::create_directories(dir);
    const auto out = dir / ("out" + std::to_string(counter) + ".txt");
    const auto err = dir / ("err" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(PWLMEL_EXE) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string example(const std::string& name) { return std::string(EXAMPLES_DIR) + "/" + name + ".json"; }

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

bool has_line(const std::string& text, const std::string& line)
{
    for (const auto& l : lines(text))
        if (l == line) return true;
    return false;
}

} // namespace

TEST_CASE("classify reports class, saddle ordinate and annulus")
{
    const auto r = run("classify " + example("sss_homoclinic"));
    REQUIRE(r.status == 0);
    CHECK(has_line(r.out, "class=SSS"));
    CHECK(has_line(r.out, "tau_RS=2"));
    CHECK(has_line(r.out, "J0=(1,2)"));
    CHECK(r.err.empty());
}

TEST_CASE("expand emits a table obeying the telescoping identity")
{
    const auto r = run("expand " + example("csc_vv"));
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["class"] == "CSC");
    CHECK(j["rank"] == 5);
    const auto& e = j["expansions"];
    for (int k = 0; k < 3; ++k) {
        const double d = e[0]["C"][k].get<double>() - e[1]["C"][k].get<double>() - e[2]["C"][k].get<double>();
        CHECK(std::abs(d) < 1e-10);
    }
    const auto p = run("expand --convention published " + example("csc_rr"));
    REQUIRE(p.status == 0);
    CHECK(nlohmann::json::parse(p.out)["convention"] == "published");
}

TEST_CASE("melnikov eval prints both methods on the grid")
{
    const auto r = run("melnikov eval --which 2 --grid 0.2:0.8:4 --method both " + example("css_real"));
    REQUIRE(r.status == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 9);
    CHECK(ls[0] == "h,M,method");
    for (std::size_t i = 1; i < ls.size(); i += 2) {
        const double a = std::stod(ls[i].substr(ls[i].find(',') + 1));
        const double b = std::stod(ls[i + 1].substr(ls[i + 1].find(',') + 1));
        CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(b)));
    }
    CHECK(run("melnikov eval --which 0 --grid 0.2:0.8:4 " + example("css_real")).status == 2);
}

TEST_CASE("orbit dump starts and ends on the section")
{
    const auto r = run("orbit dump --annulus 1 --h 0.5 --samples 8 " + example("csc_rr"));
    REQUIRE(r.status == 0);
    const auto ls = lines(r.out);
    CHECK(ls[0] == "annulus,h,zone,t,x,y");
    CHECK(ls.size() == 1 + 2 * 9);
    CHECK(ls[1].rfind("1,0.5,R,0,1,0.5", 0) == 0);
}

TEST_CASE("realize writes a spec that reproduces the reported counts")
{
    const auto spec_out = (fs::temp_directory_path() / "pwlmel_cli_test" / "realized.json").string();
    const auto r = run("realize --target 2,2,1 --spec-out " + spec_out + " " + example("sss_homoclinic"));
    REQUIRE(r.status == 0);
    const auto s = load_spec(spec_out);
    const auto rep = count_zeros(s, s.perturbation);
    CHECK(rep.counts == Triple{2, 2, 1});
    const auto csv = r.out.substr(r.out.find("annulus,lo,hi,root,slope"));
    CHECK(lines(csv).size() == 1 + 5);

    const auto cyc = run("simulate --epsilon 1e-3 --find-cycles " + spec_out);
    REQUIRE(cyc.status == 0);
    CHECK(lines(cyc.out).size() == 1 + 5);
}

TEST_CASE("realize reaches (2,2,2) on the virtual-center CSC example")
{
    const auto r = run("realize --target 2,2,2 " + example("csc_vv"));
    INFO(r.err);
    REQUIRE(r.status == 0);
    CHECK(r.err.find("counts=2,2,2") != std::string::npos);
}

TEST_CASE("simulate emits a trajectory and a displacement")
{
    const auto r = run("simulate --epsilon 1e-3 --annulus 0 --h 1.5 " + example("sss_homoclinic"));
    REQUIRE(r.status == 0);
    CHECK(lines(r.out)[0] == "t,x,y,zone");
    CHECK(r.err.rfind("displacement=", 0) == 0);
    CHECK(run("simulate --epsilon 0.5 --annulus 0 --h 1.5 " + example("sss_homoclinic")).status == 2);
}

TEST_CASE("exit codes")
{
    CHECK(run("frobnicate " + example("sss_homoclinic")).status == 2);
    CHECK(run("frobnicate x").err.rfind("UnknownSubcommand", 0) == 0);
    CHECK(run("classify /nonexistent/file.json").status == 2);
    const auto bad = fs::temp_directory_path() / "pwlmel_cli_test" / "bad.json";
    std::ofstream(bad) << "{\"left\": {";
    const auto r = run("classify " + bad.string());
    CHECK(r.status == 2);
    CHECK(r.err.rfind("ParseError", 0) == 0);
    CHECK(run("realize --target 2,2,1 " + example("css_virtual")).status == 2);
    CHECK(run("expand --convention sideways " + example("sss_homoclinic")).status == 2);
    CHECK(run("classify").status == 2);
}

TEST_CASE("identical invocations give byte-identical output")
{
    for (const std::string args : {"expand " + example("css_virtual"), "realize --target 2,2,2 " + example("csc_rr"),
                                   "melnikov eval --which 0 --grid 1.1:3:7 " + example("csc_vr")}) {
        const auto a = run(args), b = run(args);
        REQUIRE(a.status == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("output flag writes the data stream to a file")
{
    const auto path = fs::temp_directory_path() / "pwlmel_cli_test" / "classify.txt";
    const auto r = run("--output " + path.string() + " classify " + example("csc_vv"));
    REQUIRE(r.status == 0);
    CHECK(r.out.empty());
    CHECK(has_line(slurp(path), "class=CSC"));
}
