#include "qsl2/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qsl2/error.hpp"

namespace qsl2 {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::SearchExhausted:
    case Errc::DegenerateTrace:
    case Errc::NotResidue:
      return kExitExhausted;
    case Errc::VerificationFailed:
    case Errc::RowMismatch:
    case Errc::MagicNotIntegral:
      return kExitVerify;
    default:
      return kExitInvalid;
  }
}

std::mt19937_64 field_rng(std::uint64_t seed, long d) {
  // splitmix-style mixing so neighbouring seeds and fields decorrelate
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(-d);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return std::mt19937_64(z ^ (z >> 31));
}

Matrix2 random_sl2(long d, std::mt19937_64& rng, int word_len, long param_max_norm) {
  const RingDesc R = RingDesc::make(d);
  if (param_max_norm < 1) fail(Errc::InvalidInput, "param_max_norm must be >= 1");
  // |x|, |y| <= 2 sqrt(N) covers every element of norm <= N in both bases
  long bound = 1;
  while (bound * bound <= 4 * param_max_norm) ++bound;
  const std::uint64_t span = static_cast<std::uint64_t>(2 * bound + 1);
  auto coord = [&] { return static_cast<long>(rng() % span) - bound; };
  Matrix2 m = Matrix2::identity(d);
  for (int k = 0; k < word_len; ++k) {
    const std::uint64_t fam = rng() % 3;
    if (fam == 2) {
      m = m * Matrix2::from_ints(d, 0, -1, 1, 0);
      continue;
    }
    RingElem p;
    do {
      p = elem(R, coord(), coord());
    } while (p.is_zero() || norm(p) > param_max_norm);
    m = m * (fam == 0 ? e12(p) : e21(p));
  }
  return m;
}

int RunReport::exit_code() const {
  int code = kExitOk;
  for (const auto& r : rows) {
    if (r.exit_code == kExitExhausted) return kExitExhausted;
    if (r.exit_code != kExitOk) code = r.exit_code;
  }
  return code;
}

std::size_t RunReport::max_len() const {
  std::size_t m = 0;
  for (const auto& r : rows) m = std::max(m, r.cert_len);
  return m;
}

std::size_t RunReport::max_len(long d) const {
  std::size_t m = 0;
  for (const auto& r : rows)
    if (r.d == d) m = std::max(m, r.cert_len);
  return m;
}

RunReport run_selftest(const SelftestOptions& opt) {
  RunReport rep;
  if (!opt.certs_dir.empty()) std::filesystem::create_directories(opt.certs_dir);
  for (long d : opt.fields) {
    std::mt19937_64 rng = field_rng(opt.seed, d);
    for (int i = 0; i < opt.count; ++i) {
      RunRow row;
      row.d = d;
      row.index = i;
      const Matrix2 m = random_sl2(d, rng, opt.gen_word_len, opt.param_max_norm);
      PipelineConfig cfg = opt.pipeline;
      cfg.seed = opt.seed;
      Reducer red(d, cfg);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Certificate cert = red.factorize_matrix(m);
        const VerifyReport vr = verify_certificate(cert);
        row.verified = vr.ok;
        row.exit_code = vr.ok ? kExitOk : kExitVerify;
        row.error = vr.message;
        row.cert_len = cert.factors.size();
        row.certificate_json = certificate_to_json(cert);
      } catch (const Error& e) {
        row.exit_code = exit_code_for(e.code());
        row.error = e.what();
      }
      row.wall_millis =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
      row.millis = opt.timing ? row.wall_millis : 0;
      row.stats = red.stats();
      row.trials = red.stats().trials;
      row.max_t = red.stats().max_t;
      if (!opt.certs_dir.empty() && !row.certificate_json.empty()) {
        std::ofstream out(std::filesystem::path(opt.certs_dir) /
                          ("d" + std::to_string(-d) + "_" + std::to_string(i) + ".json"));
        out << row.certificate_json;
      }
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

std::string report_csv(const RunReport& rep) {
  std::ostringstream out;
  out << "d,index,cert_len,trials,max_t,millis\n";
  for (const auto& r : rep.rows)
    out << r.d << ',' << r.index << ',' << r.cert_len << ',' << r.trials << ',' << r.max_t << ',' << r.millis << '\n';
  return out.str();
}

std::string report_summary(const RunReport& rep) {
  std::ostringstream out;
  std::vector<long> fields;
  for (const auto& r : rep.rows)
    if (std::find(fields.begin(), fields.end(), r.d) == fields.end()) fields.push_back(r.d);
  for (long d : fields) {
    std::size_t n = 0, ok = 0, lmin = SIZE_MAX, lmax = 0;
    double lsum = 0, trials = 0;
    unsigned long tmax = 0;
    long long ms = 0;
    for (const auto& r : rep.rows) {
      if (r.d != d) continue;
      ++n;
      if (r.verified) ++ok;
      lmin = std::min(lmin, r.cert_len);
      lmax = std::max(lmax, r.cert_len);
      lsum += static_cast<double>(r.cert_len);
      trials += static_cast<double>(r.trials);
      tmax = std::max(tmax, r.max_t);
      ms += r.wall_millis;
    }
    out << "d=" << d << " verified " << ok << "/" << n << "  len min/max/mean " << lmin << "/" << lmax << "/"
        << (n ? lsum / static_cast<double>(n) : 0.0) << "  mean trials " << (n ? trials / static_cast<double>(n) : 0.0)
        << "  max t " << tmax << "  " << ms << " ms\n";
  }
  return out.str();
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix2 read_matrix(const std::string& arg, long d) {
  if (arg == "identity") return Matrix2::identity(d);
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '[') return matrix_from_json(arg, d);
  return matrix_from_json(slurp(arg), d);
}

std::vector<long> parse_fields(const std::string& list) {
  std::vector<long> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(Errc::InvalidInput, "bad field list entry '" + item + "'");
    }
  }
  if (out.empty()) fail(Errc::InvalidInput, "empty field list");
  return out;
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::InvalidInput, "cannot write " + path);
  out << text;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Bounded-generation factorizations in SL2 over imaginary quadratic integers"};
  app.require_subcommand(1);

  long d = 0;
  std::string matrix_arg, out_path;
  std::uint64_t seed = 1, budget = 0;
  auto* factor = app.add_subcommand("factor", "factor a determinant-one matrix into registry factors");
  factor->add_option("--d", d, "squarefree negative d")->required();
  factor->add_option("--matrix", matrix_arg, "matrix JSON, a file holding it, or 'identity'")->required();
  factor->add_option("--out", out_path, "certificate output file (default stdout)");
  factor->add_option("--seed", seed, "run seed");
  factor->add_option("--budget", budget, "candidates per prime search");

  std::string cert_path;
  auto* verify = app.add_subcommand("verify", "check a certificate");
  verify->add_option("certificate", cert_path, "certificate JSON file")->required();

  SelftestOptions opt;
  std::string fields, csv_path;
  bool summary = false;
  auto* selftest = app.add_subcommand("selftest", "factor and verify seeded random matrices, emit CSV");
  selftest->alias("stats");
  selftest->add_option("--fields", fields, "comma-separated d values (default: the nine class-number-one fields)");
  selftest->add_option("--count", opt.count, "matrices per field")->check(CLI::NonNegativeNumber);
  selftest->add_option("--seed", opt.seed, "generator seed");
  selftest->add_option("--gen-word-len", opt.gen_word_len, "generator word length")->check(CLI::NonNegativeNumber);
  selftest->add_option("--param-max-norm", opt.param_max_norm, "largest parameter norm")->check(CLI::PositiveNumber);
  selftest->add_option("--csv", csv_path, "CSV output file (default stdout)");
  selftest->add_option("--certs", opt.certs_dir, "directory receiving every certificate");
  selftest->add_option("--budget", budget, "candidates per prime search");
  selftest->add_flag("--timing", opt.timing, "record wall-clock millis (breaks byte-identical CSVs)");
  selftest->add_flag("--summary", summary, "per-field summary on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*factor) {
      PipelineConfig cfg;
      cfg.seed = seed;
      if (budget > 0) cfg.primes.search_budget = budget;
      Reducer red(d, cfg);
      const Matrix2 m = read_matrix(matrix_arg, d);
      const Certificate cert = red.factorize_matrix(m);
      write_out(out_path, certificate_to_json(cert));
      return kExitOk;
    }
    if (*verify) {
      const Certificate cert = certificate_from_json(slurp(cert_path));
      const VerifyReport rep = verify_certificate(cert);
      if (!rep.ok) {
        std::cerr << "verification failed: " << rep.message << "\n";
        return kExitVerify;
      }
      std::cerr << "ok: " << cert.factors.size() << " factors\n";
      return kExitOk;
    }
    if (*selftest) {
      if (!fields.empty()) opt.fields = parse_fields(fields);
      for (long f : opt.fields) RingDesc::make(f);  // reject bad d before running anything
      if (budget > 0) opt.pipeline.primes.search_budget = budget;
      const RunReport rep = run_selftest(opt);
      write_out(csv_path, report_csv(rep));
      for (const auto& r : rep.rows)
        if (r.exit_code != kExitOk) std::cerr << "d=" << r.d << " #" << r.index << ": " << r.error << "\n";
      if (summary) std::cerr << report_summary(rep);
      return rep.exit_code();
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kExitInvalid;
}

}  // namespace qsl2
