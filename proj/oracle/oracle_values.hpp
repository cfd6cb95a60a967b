#pragma once
// Generated by oracle/relaxation_oracle.py (50-digit arithmetic). Do not edit.

namespace oracle {

struct RatePoint {
  double b, temp, residual, direct, orbach, total;
};

// gamma = 4e8 Hz/T, published relaxation parameters
inline constexpr RatePoint kRatePoints[] = {
    {6.0, 1.6, 9.5e-5, 3.981312e-4, 1.3592189289370219e-9, 4.9313255921892894e-4},
    {3.0, 4.0, 9.5e-5, 6.2208e-5, 2.9326741479877536, 2.9328313559877536},
    {0.0, 1.6, 9.5e-5, 0.0, 4.6226811327517992e-7, 9.546226811327518e-5},
    {0.0, 4.5, 9.5e-5, 0.0, 4.2937417299445894, 4.2938367299445894},
    {1.0, 2.0, 9.5e-5, 3.84e-7, 7.949049677423587e-5, 1.7487449677423587e-4},
    {2.0, 3.0, 9.5e-5, 9.216e-6, 8.4133576628439573e-2, 8.4237792628439573e-2},
    {4.0, 2.5, 9.5e-5, 1.2288e-4, 2.4524359227591892e-3, 2.6703159227591892e-3},
    {5.0, 4.5, 9.5e-5, 5.4e-4, 6.0192091371707451, 6.0198441371707451},
    {1.5, 1.6, 9.5e-5, 1.5552e-6, 5.3208252905441687e-7, 9.7087282529054417e-5},
    {6.0, 4.0, 9.5e-5, 9.95328e-4, 7.4413892100531244e-1, 7.4522924900531244e-1},
};

inline constexpr double kBleaneyYag = 1.2514403944873736e-26;
inline constexpr double kBroadeningCoeff = 2.6024096385542169e+8;  // Hz/T^2

}  // namespace oracle
