// Digit-side core: lambda/second-digit extraction, the relation S in both
// one-shot and tabulated form, successors and counts over S, rank checks for
// box candidates, and the brute-force power-gap scan.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "forge/radix.hpp"

using namespace forge;

namespace {

// Independent membership oracle via the interval form: (k^a, ell^m) is in S
// iff some power z of k has k^a < z and z + k^a <= ell^m < z + k^(a+1).
// Deliberately shares no code with s_member (which goes through digits).
bool s_interval(const BasePair& b, std::uint64_t a, std::uint64_t m) {
  const Nat x = nat_pow(Nat(b.k), a);
  const Nat y = nat_pow(Nat(b.ell), m);
  for (Nat z = x * b.k; z <= y; z *= b.k)
    if (z + x <= y && y < z + b.k * x) return true;
  return false;
}

}  // namespace

TEST_CASE("lambda_floor picks the largest power of k below the argument") {
  const BasePair b = make_base_pair(2, 3);
  CHECK(lambda_floor(b, Nat(9)) == PowK{3});
  CHECK(lambda_floor(b, Nat(8)) == PowK{3});
  CHECK(lambda_floor(b, Nat(7)) == PowK{2});
  CHECK(lambda_floor(b, Nat(1)) == PowK{0});
  CHECK(lambda_floor(make_base_pair(3, 5), Nat(27)) == PowK{3});
  CHECK(lambda_floor(make_base_pair(3, 5), Nat(26)) == PowK{2});
  CHECK_THROWS_AS(lambda_floor(b, Nat(0)), DomainError);
}

TEST_CASE("second_power strips the full leading digit, not one power") {
  const BasePair b = make_base_pair(2, 3);
  CHECK(second_power(b, Nat(9)) == PowK{0});    // 9 = 8 + 1
  CHECK(second_power(b, Nat(27)) == PowK{3});   // 27 = 16 + 8 + 2 + 1
  CHECK(second_power(b, Nat(243)) == PowK{6});  // 243 = 128 + 64 + ...
  CHECK_THROWS_AS(second_power(b, Nat(8)), NoSecondDigit);
  CHECK_THROWS_AS(second_power(b, Nat(1)), NoSecondDigit);
  CHECK_THROWS_AS(second_power(b, Nat(0)), DomainError);

  const BasePair b35 = make_base_pair(3, 5);
  // 25 = 221 base 3: the leading digit is 2, and stripping it must remove
  // both copies of 9 (second digit block starts at 3^1)
  CHECK(second_power(b35, Nat(25)) == PowK{1});
}

TEST_CASE("s_member matches the worked examples") {
  const BasePair b = make_base_pair(2, 3);
  // 3^5 = 243 = 11110011 base 2: leading 1, second digit at 2^6
  CHECK(s_member(b, PowK{6}, PowL{5}));
  // 3^6 = 729 and 3^7 = 2187 both carry their second digit at 2^7
  CHECK(s_member(b, PowK{7}, PowL{6}));
  CHECK(s_member(b, PowK{7}, PowL{7}));
  // 9 = 1001 base 2
  CHECK(s_member(b, PowK{0}, PowL{2}));
  // near-misses around the frozen positives
  CHECK_FALSE(s_member(b, PowK{5}, PowL{5}));
  CHECK_FALSE(s_member(b, PowK{7}, PowL{5}));
  CHECK_FALSE(s_member(b, PowK{6}, PowL{6}));
  // y = 1 has a single digit and is in no S
  CHECK_FALSE(s_member(b, PowK{0}, PowL{0}));
  // 3 = 11 base 2: second digit at 2^0
  CHECK(s_member(b, PowK{0}, PowL{1}));
  CHECK_FALSE(s_member(b, PowK{1}, PowL{1}));
}

TEST_CASE("s_member enforces the leading-digit-one gate for k > 2") {
  const BasePair b = make_base_pair(3, 5);
  // 25 = 221 base 3 starts with digit 2, so it belongs to no S(3^a)
  for (std::uint64_t a = 0; a <= 3; ++a)
    CHECK_FALSE(s_member(b, PowK{a}, PowL{2}));
  // 5 = 12 base 3 does qualify: leading 1, second digit at 3^0
  CHECK(s_member(b, PowK{0}, PowL{1}));
  CHECK_FALSE(s_member(b, PowK{1}, PowL{1}));
}

TEST_CASE("table membership agrees with one-shot membership") {
  for (auto [k, ell] : {std::pair<std::uint64_t, std::uint64_t>{2, 3}, {3, 5}, {2, 5}}) {
    const BasePair b = make_base_pair(k, ell);
    const SecondDigitTable tab(b, 150);
    for (std::uint64_t m = 0; m <= 150; ++m)
      for (std::uint64_t a = 0; a <= 20; ++a)
        CHECK(tab.s_member(m, a) == s_member(b, PowK{a}, PowL{m}));
  }
}

TEST_CASE("digit membership agrees with the interval form on a small grid") {
  for (auto [k, ell] : {std::pair<std::uint64_t, std::uint64_t>{2, 3}, {3, 5}, {2, 5}}) {
    const BasePair b = make_base_pair(k, ell);
    for (std::uint64_t a = 0; a <= 12; ++a)
      for (std::uint64_t m = 0; m <= 30; ++m)
        CHECK(s_member(b, PowK{a}, PowL{m}) == s_interval(b, a, m));
  }
}

TEST_CASE("table bookkeeping: top, second, leading digit") {
  const BasePair b = make_base_pair(2, 3);
  const SecondDigitTable tab(b, 10);
  CHECK(tab.m_max() == 10);
  CHECK(tab.top(0) == 0);
  CHECK(tab.second(0) == -1);  // 1 is a bare power of 2
  CHECK(tab.top(2) == 3);
  CHECK(tab.second(2) == 0);
  CHECK(tab.top(5) == 7);
  CHECK(tab.second(5) == 6);
  CHECK(tab.leading_digit_one(7));  // base 2: always

  const SecondDigitTable t35(make_base_pair(3, 5), 4);
  CHECK(t35.top(2) == 2);
  CHECK_FALSE(t35.leading_digit_one(2));  // 25 = 221 base 3
  CHECK(t35.leading_digit_one(1));        // 5 = 12 base 3
}

TEST_CASE("s_scan returns the exponent window of S-members") {
  const BasePair b = make_base_pair(2, 3);
  CHECK(s_scan(b, PowK{7}, 5, 7) == std::vector<PowL>{PowL{6}, PowL{7}});
  CHECK(s_scan(b, PowK{6}, 5, 7) == std::vector<PowL>{PowL{5}});
  CHECK(s_scan(b, PowK{0}, 0, 2) == std::vector<PowL>{PowL{1}, PowL{2}});

  const SecondDigitTable tab(b, 50);
  CHECK(s_scan(tab, PowK{7}, 5, 7) == s_scan(b, PowK{7}, 5, 7));
  CHECK_THROWS_AS(s_scan(b, PowK{7}, 7, 5), RangeError);
  CHECK_THROWS_AS(s_scan(tab, PowK{7}, 40, 60), RangeError);
}

TEST_CASE("sigma1 shifts exponents") {
  CHECK(sigma1(0, PowK{5}) == PowK{5});
  CHECK(sigma1(1, PowK{5}) == PowK{6});
  CHECK(sigma1(3, PowK{0}) == PowK{3});
}

TEST_CASE("sigma2 finds the least successor inside S(K)") {
  const BasePair b = make_base_pair(2, 3);
  const auto succ = sigma2(b, PowK{7}, PowL{6}, 100);
  REQUIRE(succ.has_value());
  CHECK(*succ == PowL{7});

  // least-successor property: nothing in S(K) strictly between anchor and result
  const SecondDigitTable tab(b, 200);
  for (std::uint64_t m = 0; m <= 60; ++m) {
    for (std::uint64_t a = 0; a <= 12; ++a) {
      if (!tab.s_member(m, a)) continue;
      const auto s = sigma2(tab, PowK{a}, PowL{m}, 200);
      if (!s) continue;
      CHECK(tab.s_member(s->exp, a));
      for (std::uint64_t mm = m + 1; mm < s->exp; ++mm)
        CHECK_FALSE(tab.s_member(mm, a));
    }
  }

  CHECK_THROWS_AS(sigma2(b, PowK{5}, PowL{6}, 100), NotInS);
  // successor of 9 in S(2^0) does not appear below exponent 200
  CHECK_FALSE(sigma2(b, PowK{0}, PowL{2}, 200).has_value());
}

TEST_CASE("theta_count counts the visiting powers between consecutive anchors") {
  const BasePair b = make_base_pair(2, 3);
  // frozen window: anchors 3^34 and 3^36 in S(2^52); 3^35 sits in S(2^53)
  CHECK(theta_count(b, PowK{52}, PowK{53}, PowL{34}, 100) == 1);
  CHECK(theta_count(b, PowK{52}, PowK{52}, PowL{34}, 100) == 0);

  // recount against the table directly
  const SecondDigitTable tab(b, 300);
  for (std::uint64_t m = 0; m <= 80; ++m) {
    for (std::uint64_t a = 0; a <= 14; ++a) {
      if (!tab.s_member(m, a)) continue;
      const auto s = sigma2(tab, PowK{a}, PowL{m}, 300);
      if (!s) continue;
      for (std::uint64_t aa = 0; aa <= 16; ++aa) {
        std::uint64_t expect = 0;
        for (std::uint64_t mm = m + 1; mm < s->exp; ++mm)
          if (tab.s_member(mm, aa)) ++expect;
        CHECK(theta_count(tab, PowK{a}, PowK{aa}, PowL{m}, 300) == expect);
      }
    }
  }

  CHECK_THROWS_AS(theta_count(b, PowK{5}, PowK{5}, PowL{6}, 100), NotInS);
  CHECK_THROWS_AS(theta_count(b, PowK{0}, PowK{0}, PowL{2}, 200), SuccessorUnbounded);
}

TEST_CASE("omega_member reads bits of the theta count") {
  const BasePair b = make_base_pair(2, 3);
  // count is 1 in the frozen window: bit 1 set, bit 2 clear
  CHECK(omega_member(b, 1, 1, PowK{52}, PowK{53}, PowL{34}, 100));
  CHECK(omega_member(b, 2, 1, PowK{52}, PowK{53}, PowL{34}, 100));
  CHECK_FALSE(omega_member(b, 2, 2, PowK{52}, PowK{53}, PowL{34}, 100));
  // count 0: no bit set
  CHECK_FALSE(omega_member(b, 1, 1, PowK{52}, PowK{52}, PowL{34}, 100));

  CHECK_THROWS_AS(omega_member(b, 2, 0, PowK{52}, PowK{53}, PowL{34}, 100), DomainError);
  CHECK_THROWS_AS(omega_member(b, 2, 3, PowK{52}, PowK{53}, PowL{34}, 100), DomainError);
  CHECK_THROWS_AS(omega_member(b, 64, 1, PowK{52}, PowK{53}, PowL{34}, 100), DomainError);

  // counts at or above 2^u are rejected wholesale: recheck against theta_count
  const SecondDigitTable tab(b, 300);
  for (std::uint64_t m = 0; m <= 60; ++m) {
    if (!tab.s_member(m, 0)) continue;
    if (!sigma2(tab, PowK{0}, PowL{m}, 300)) continue;
    const std::uint64_t c = theta_count(tab, PowK{0}, PowK{1}, PowL{m}, 300);
    for (std::uint64_t u = 1; u <= 3; ++u)
      for (std::uint64_t v = 1; v <= u; ++v) {
        const bool expect = c < (std::uint64_t{1} << u) && ((c >> (v - 1)) & 1);
        CHECK(omega_member(tab, u, v, PowK{0}, PowK{1}, PowL{m}, 300) == expect);
      }
  }
}

TEST_CASE("d_check computes ranks and rejects malformed witnesses") {
  const BasePair b = make_base_pair(2, 3);
  const auto r1 = d_check(b, DWitness{PowK{52}, PowK{53}, PowL{34}, PowL{36}});
  REQUIRE(r1.has_value());
  CHECK(*r1 == std::make_pair(std::uint64_t{1}, std::uint64_t{1}));

  const auto r2 = d_check(b, DWitness{PowK{7}, PowK{8}, PowL{6}, PowL{7}});
  REQUIRE(r2.has_value());
  CHECK(*r2 == std::make_pair(std::uint64_t{1}, std::uint64_t{1}));

  // degenerate box: equal ends, both ranks zero
  const auto r0 = d_check(b, DWitness{PowK{7}, PowK{7}, PowL{6}, PowL{6}});
  REQUIRE(r0.has_value());
  CHECK(*r0 == std::make_pair(std::uint64_t{0}, std::uint64_t{0}));

  // disorder and non-membership are absences, not errors
  CHECK_FALSE(d_check(b, DWitness{PowK{8}, PowK{7}, PowL{6}, PowL{7}}).has_value());
  CHECK_FALSE(d_check(b, DWitness{PowK{7}, PowK{8}, PowL{7}, PowL{6}}).has_value());
  CHECK_FALSE(d_check(b, DWitness{PowK{5}, PowK{8}, PowL{6}, PowL{7}}).has_value());
  CHECK_FALSE(d_check(b, DWitness{PowK{7}, PowK{8}, PowL{6}, PowL{8}}).has_value());
}

TEST_CASE("d_check second rank counts a half-open window anchored left") {
  const BasePair b = make_base_pair(2, 3);
  // S(2^52) meets [34, 36) in exactly {34}; the right end is excluded
  const SecondDigitTable tab(b, 40);
  std::uint64_t count = 0;
  for (std::uint64_t m = 34; m < 36; ++m)
    if (tab.s_member(m, 52)) ++count;
  CHECK(count == 1);
  const auto r = d_check(b, DWitness{PowK{52}, PowK{53}, PowL{34}, PowL{36}});
  REQUIRE(r.has_value());
  CHECK(r->second == count);
}

TEST_CASE("baker_gap_scan finds the minimal |k^a - ell^b| with all witnesses") {
  const BasePair b = make_base_pair(2, 3);
  const BakerScan scan = baker_gap_scan(b, 30, 30);
  CHECK(scan.minGap == 1);
  CHECK(scan.witnesses ==
        std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1, 1}, {2, 1}, {3, 2}});

  // growing the search box can only shrink or keep the minimum
  Nat prev = 0;
  for (std::uint64_t bound = 2; bound <= 30; bound += 7) {
    const BakerScan s = baker_gap_scan(b, bound, bound);
    if (prev != 0) CHECK(s.minGap <= prev);
    prev = s.minGap;
  }

  const BakerScan s25 = baker_gap_scan(make_base_pair(2, 5), 20, 20);
  CHECK(s25.minGap == 1);
  CHECK(s25.witnesses ==
        std::vector<std::pair<std::uint64_t, std::uint64_t>>{{2, 1}});

  CHECK_THROWS_AS(baker_gap_scan(b, 0, 5), DomainError);
  CHECK_THROWS_AS(baker_gap_scan(b, 5, 0), DomainError);
}

TEST_CASE("base pair validation rejects dependent or degenerate bases") {
  CHECK_THROWS_AS(make_base_pair(1, 3), InvalidBase);
  CHECK_THROWS_AS(make_base_pair(2, 1), InvalidBase);
  CHECK_THROWS_AS(make_base_pair(2, 4), InvalidBase);
  CHECK_THROWS_AS(make_base_pair(8, 2), InvalidBase);
  CHECK_THROWS_AS(make_base_pair(4, 8), InvalidBase);  // both powers of 2
  CHECK_THROWS_AS(make_base_pair(9, 27), InvalidBase);
  CHECK_NOTHROW(make_base_pair(4, 5));
  CHECK_NOTHROW(make_base_pair(6, 12));  // 6 and 12 share no common root
  CHECK(mult_independent(2, 3));
  CHECK_FALSE(mult_independent(4, 8));
}

TEST_CASE("floor_log and rational variants are exact at boundaries") {
  CHECK(floor_log(2, Nat(1)) == 0);
  CHECK(floor_log(2, Nat(1023)) == 9);
  CHECK(floor_log(2, Nat(1024)) == 10);
  CHECK(floor_log(3, nat_pow(Nat(3), 41)) == 41);
  CHECK(floor_log(3, nat_pow(Nat(3), 41) - 1) == 40);
  CHECK(floor_log(10, Nat(999)) == 2);
  CHECK_THROWS_AS(floor_log(1, Nat(5)), DomainError);
  CHECK_THROWS_AS(floor_log(2, Nat(0)), DomainError);

  CHECK(floor_log_rat(2, Rat(1)) == 0);
  CHECK(floor_log_rat(2, Rat(1, 2)) == -1);
  CHECK(floor_log_rat(2, Rat(1, 3)) == -2);
  CHECK(floor_log_rat(2, Rat(3, 8)) == -2);
  CHECK(floor_log_rat(3, Rat(1, 9)) == -2);
  CHECK(floor_log_rat(3, Rat(1, 10)) == -3);
  CHECK_THROWS_AS(floor_log_rat(2, Rat(0)), DomainError);

  CHECK(cmp_pow(Rat(1, 2), 2, -1) == 0);
  CHECK(cmp_pow(Rat(3, 8), 2, -2) == 1);
  CHECK(cmp_pow(Rat(3, 8), 2, -1) == -1);
  CHECK(cmp_pow(Rat(8), 2, 3) == 0);
}
