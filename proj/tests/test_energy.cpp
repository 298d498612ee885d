#include <doctest.h>

#include <cmath>
#include <random>

#include "msgather/energy.hpp"

using namespace msgather;

namespace {
EnergyModelParams params() { return EnergyModelParams{}; }
}

TEST_CASE("tx_power endpoints are exact") {
  auto p = params();
  CHECK(tx_power_mw(4.3, p) == 29.04);
  CHECK(tx_power_mw(45.0, p) == 57.42);
}

TEST_CASE("tx_power clamps below d_min") {
  auto p = params();
  CHECK(tx_power_mw(2.0, p) == 29.04);
  CHECK(tx_power_mw(0.0, p) == 29.04);
}

TEST_CASE("tx_power at the d^2 midpoint is the power midpoint") {
  auto p = params();
  // Interpolation is linear in d^2, so the midpoint of [d_min^2, d_max^2]
  // must map onto the midpoint of the two published endpoint powers.
  const double d = std::sqrt((4.3 * 4.3 + 45.0 * 45.0) / 2.0);
  const double expected = (29.04 + 57.42) / 2.0;  // 43.23
  CHECK(tx_power_mw(d, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(43.23).epsilon(1e-12));
}

TEST_CASE("tx_power rejects distances beyond the radio range") {
  CHECK_THROWS_AS(tx_power_mw(45.01, params()), RoutingError);
}

TEST_CASE("tx_power is monotone non-decreasing in distance") {
  auto p = params();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0.0, 45.0);
  for (int i = 0; i < 2000; ++i) {
    double a = dist(rng), b = dist(rng);
    if (a > b) std::swap(a, b);
    CHECK(tx_power_mw(a, p) <= tx_power_mw(b, p));
  }
}

TEST_CASE("tx_energy matches hand multiplication at max range") {
  // 57.42 mW for 1000 bits at 250 kbps: 57.42e-3 * 0.004 s.
  const double e = tx_energy_j(1000.0, 45.0, params());
  CHECK(e == doctest::Approx(2.2968e-4).epsilon(1e-12));
}

TEST_CASE("tx_energy rejects empty packets and is linear in size") {
  auto p = params();
  CHECK_THROWS_AS(tx_energy_j(0.0, 10.0, p), ConfigError);
  CHECK(tx_energy_j(2000.0, 30.0, p) ==
        doctest::Approx(2.0 * tx_energy_j(1000.0, 30.0, p)).epsilon(1e-12));
}

TEST_CASE("rx_energy matches hand multiplication and is linear") {
  auto p = params();
  CHECK(rx_energy_j(1000.0, p) == doctest::Approx(2.48e-4).epsilon(1e-12));
  CHECK(rx_energy_j(2000.0, p) ==
        doctest::Approx(2.0 * rx_energy_j(1000.0, p)).epsilon(1e-12));
  CHECK_THROWS_AS(rx_energy_j(-5.0, p), ConfigError);
}

TEST_CASE("sleep_energy basics") {
  auto p = params();
  CHECK(sleep_energy_j(100.0, p) == doctest::Approx(1.6e-3).epsilon(1e-12));
  CHECK(sleep_energy_j(0.0, p) == 0.0);
  CHECK(sleep_energy_j(40.0, p) + sleep_energy_j(60.0, p) ==
        doctest::Approx(sleep_energy_j(100.0, p)).epsilon(1e-12));
  CHECK_THROWS_AS(sleep_energy_j(-1.0, p), ConfigError);
}

TEST_CASE("debit subtracts and records") {
  EnergyLedger ledger(1, true);
  SensorNode n;
  n.id = 0;
  n.residual_energy = 500.0;
  ledger.debit(n, 1.0, EventKind::Rx, 2.48e-4, "rx");
  CHECK(n.residual_energy == doctest::Approx(499.999752).epsilon(1e-12));
  CHECK(ledger.events().size() == 1);
  CHECK(ledger.debited_of(0) == doctest::Approx(2.48e-4));
  CHECK(std::isnan(ledger.death_time(0)));
}

TEST_CASE("debit floors at zero and records the death") {
  EnergyLedger ledger(1, true);
  SensorNode n;
  n.id = 0;
  n.residual_energy = 1e-5;
  ledger.debit(n, 7.5, EventKind::Rx, 2.48e-4, "rx");
  CHECK(n.residual_energy == 0.0);
  CHECK_FALSE(n.alive());
  CHECK(ledger.death_time(0) == 7.5);
  CHECK(ledger.deaths() == 1);
  // Truncation closes the balance and stays below one event's amount.
  CHECK(ledger.truncated_of(0) == doctest::Approx(2.48e-4 - 1e-5));
  CHECK(ledger.debited_of(0) == doctest::Approx(1e-5));
}

TEST_CASE("debit on a dead node is a protocol error") {
  EnergyLedger ledger(1, false);
  SensorNode n;
  n.id = 0;
  n.residual_energy = 0.0;
  CHECK_THROWS_AS(ledger.debit(n, 0.0, EventKind::Tx, 1.0, "x"), ProtocolError);
}

TEST_CASE("ledger balances against residuals over random debits") {
  const int n = 20;
  EnergyLedger ledger(n, false);
  std::vector<SensorNode> nodes(n);
  const double e0 = 0.01;
  for (int i = 0; i < n; ++i) {
    nodes[i].id = i;
    nodes[i].residual_energy = e0;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amt(0.0, 5e-4);
  for (int step = 0; step < 5000; ++step) {
    const int i = static_cast<int>(rng() % n);
    if (!nodes[i].alive()) continue;
    ledger.debit(nodes[i], step, EventKind::Tx, amt(rng), "t");
  }
  double residual = 0.0;
  for (const auto& sn : nodes) residual += sn.residual_energy;
  const double total = residual + ledger.total_debited();
  CHECK(total == doctest::Approx(n * e0).epsilon(1e-9));
}
