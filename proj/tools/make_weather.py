"""Regenerates the synthetic hourly climate profiles under assets/weather/.

Each profile is a smooth annual + diurnal temperature cycle with seeded
day-to-day noise, a lagged ground temperature, clear-sky-shaped solar gain,
a weekday office occupancy schedule and a time-of-use electricity tariff.
"""

import argparse
import math
import pathlib

import numpy as np

# name: (annual mean C, annual amplitude, diurnal amplitude, peak solar W/m2, latitude-ish day length swing h, tariff scale)
CLIMATES = {
    "Warm_Marine": (14.0, 3.5, 4.0, 650.0, 2.5, 1.10),
    "Mixed_Marine": (11.5, 7.0, 4.5, 600.0, 4.0, 0.95),
    "Cool_Marine": (8.5, 6.5, 4.0, 520.0, 4.5, 0.90),
    "Warm_Humid": (21.0, 8.0, 5.0, 780.0, 2.0, 0.85),
    "Warm_Dry": (19.0, 11.0, 8.0, 900.0, 2.5, 1.00),
    "Hot_Humid": (25.5, 3.5, 4.0, 820.0, 1.5, 0.90),
}

HOURS = 8760


def tariff(hour_of_day: int, weekday: bool) -> float:
    if not weekday:
        return 0.10
    if 16 <= hour_of_day < 21:
        return 0.28
    if 8 <= hour_of_day < 16:
        return 0.16
    return 0.10


def occupancy(hour_of_day: int, weekday: bool) -> float:
    if not weekday:
        return 0.05
    if 8 <= hour_of_day < 18:
        return 1.0
    if hour_of_day in (7, 18):
        return 0.5
    return 0.05


def make_profile(name: str, seed: int) -> str:
    mean, annual, diurnal, solar_peak, day_swing, price_scale = CLIMATES[name]
    rng = np.random.default_rng(seed)
    # Day-to-day weather noise as a smoothed random walk.
    daily = np.convolve(rng.normal(0.0, 2.0, 365 + 6), np.ones(7) / 7.0, mode="valid")[:365]
    cloud = np.clip(rng.beta(4.0, 2.0, 365), 0.15, 1.0)
    lines = ["hour,outdoor_temp_c,ground_temp_c,solar_wm2,occupancy_frac,price_per_kwh"]
    for h in range(HOURS):
        day, hod = divmod(h, 24)
        season = -math.cos(2.0 * math.pi * (day - 15) / 365.0)  # coldest mid-January
        t_out = mean + annual * season + diurnal * math.sin(2.0 * math.pi * (hod - 9) / 24.0) + daily[day]
        t_ground = mean + 0.35 * annual * -math.cos(2.0 * math.pi * (day - 45) / 365.0)
        day_length = 12.0 + day_swing * -season
        sunrise = 12.0 - day_length / 2.0
        x = (hod + 0.5 - sunrise) / day_length
        solar = solar_peak * cloud[day] * math.sin(math.pi * x) ** 1.5 if 0.0 < x < 1.0 else 0.0
        solar *= 0.75 + 0.25 * (season + 1.0) / 2.0 * -1.0 + 0.25
        weekday = (day % 7) < 5
        price = price_scale * tariff(hod, weekday)
        lines.append(
            f"{h},{t_out:.3f},{t_ground:.3f},{max(solar, 0.0):.2f},{occupancy(hod, weekday):.2f},{price:.4f}"
        )
    return "\n".join(lines) + "\n"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "assets" / "weather"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, name in enumerate(sorted(CLIMATES)):
        (out / f"{name}.csv").write_text(make_profile(name, 1000 + i))


if __name__ == "__main__":
    main()
