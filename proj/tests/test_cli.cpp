#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rbmld/cli.hpp"
#include "rbmld/saddle.hpp"

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = rbmld::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("rates writes the documented columns with round-trip precision") {
  const auto r = run({"rates", "--ic", "all", "--a-min", "0.01", "--a-max", "10", "--points", "50"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 51);
  CHECK(ls[0] == "a,r_packed,r_flat,r_stat,z_a,w_minus,w_plus");
  CHECK(r.out.find("\r\n") != std::string::npos);
  const auto last = ls.back();
  const double a = std::stod(last.substr(0, last.find(',')));
  CHECK(a == 10.0);
  const auto second_field = last.substr(last.find(',') + 1, last.find(',', last.find(',') + 1) - last.find(',') - 1);
  CHECK(std::stod(second_field) == rbmld::rate_packed(rbmld::Deviation(10.0)));
}

TEST_CASE("figure1 columns and json output") {
  const auto r = run({"--format", "json", "figure1", "--a-max", "6", "--points", "200"});
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["command"] == "figure1");
  REQUIRE(doc["rows"].size() == 200);
  const auto& row = doc["rows"][199];
  CHECK(row["a"].get<double>() == 6.0);
  for (const char* key : {"r_flat", "asym_small", "asym_large"}) CHECK(row.contains(key));
  CHECK(row["asym_large"].get<double>() == doctest::Approx(24.5));
}

TEST_CASE("prob reports probability and diagnostics") {
  const auto r = run({"prob", "--ic", "packed", "--t", "4", "--a", "1"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "ic,t,a,rho,s_offset,p,log_survival,im_residue,refinement_delta");
  CHECK(ls[1].rfind("packed,4,1,1,0,0.99999", 0) == 0);
}

TEST_CASE("identical arguments give byte-identical files") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto f1 = dir / "rbmld_cli_a.csv", f2 = dir / "rbmld_cli_b.csv";
  for (const auto& f : {f1, f2})
    REQUIRE(run({"--out", f.string(), "simulate", "--t", "2", "--reps", "20", "--dt", "1e-3", "--seed", "5", "--a", "0.5"}).status == 0);
  const auto a = slurp(f1);
  CHECK(!a.empty());
  CHECK(a == slurp(f2));
  CHECK(lines(a)[0] == "rep,position,exceeds");
  std::filesystem::remove(f1);
  std::filesystem::remove(f2);
}

TEST_CASE("validation errors exit with status 2 before computing") {
  CHECK(run({}).status == 2);
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({"rates", "--a-min", "-1"}).status == 2);
  CHECK(run({"rates", "--points", "0"}).status == 2);
  CHECK(run({"prob", "--a", "0"}).status == 2);
  CHECK(run({"prob", "--t", "-4"}).status == 2);
  CHECK(run({"prob", "--ic", "packed", "--rho", "0.5"}).status == 2);
  CHECK(run({"prob", "--ppu", "2"}).status == 2);
  CHECK(run({"simulate", "--dt", "0.5"}).status == 2);
  CHECK(run({"simulate", "--ic", "wedge"}).status == 2);
  CHECK(run({"tail", "--t-list", "8,4"}).status == 2);
  CHECK(run({"verify", "--criterion", "99"}).status == 2);
  CHECK(run({"--format", "xml", "rates"}).status == 2);
  const auto r = run({"prob", "--t", "-4"});
  CHECK(r.err.find("[error]") != std::string::npos);
}

TEST_CASE("config file mirrors flags and flags win") {
  const auto cfg = std::filesystem::temp_directory_path() / "rbmld_cli.cfg";
  {
    std::ofstream out(cfg);
    out << "# rate table\npoints = 3\na_min=0.5\na-max = 2\nic = flat\n";
  }
  const auto r = run({"rates", "--config", cfg.string(), "--points", "4"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  CHECK(ls.size() == 5);
  CHECK(ls[0] == "a,r_flat,z_a");
  CHECK(ls[1].rfind("0.5,", 0) == 0);
  {
    std::ofstream out(cfg);
    out << "this line has no equals sign\n";
  }
  CHECK(run({"rates", "--config", cfg.string()}).status == 2);
  CHECK(run({"rates", "--config", "/nonexistent/rbmld.cfg"}).status == 2);
  std::filesystem::remove(cfg);
}

TEST_CASE("verify prints one line per criterion") {
  const auto r = run({"verify", "--criterion", "1,2"});
  CHECK(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0].rfind("C01 PASS", 0) == 0);
  CHECK(ls[1].rfind("C02 PASS", 0) == 0);
  const auto bad = run({"verify", "--criterion", "4"});
  CHECK(bad.status == 1);
}
