"""Shows how requested sample periods quantize onto the poll-wake grid and
what the resulting wake timeline looks like."""

from wsn_pathosim import CyclicSleepConfig, wake_timeline

print("requested -> effective period (poll every 28 s):")
for sample_s in (14.0, 42.0, 120.0, 1800.0, 3600.0):
    sleep = CyclicSleepConfig.from_periods(sample_s, 28.0)
    print(f"  {sample_s:7.0f} s  ->  {sleep.multiplier:3d} polls"
          f"  =  {sleep.effective_period_s:7.0f} s")
print()

sleep = CyclicSleepConfig.from_periods(120.0, 28.0)
polls, externals = wake_timeline(sleep, 600.0)
print(f"first 10 minutes of a {sleep.sample_period_s:.0f} s device"
      f" (effective {sleep.effective_period_s:.0f} s):")
for t in polls:
    mark = "external wake, round starts" if t in externals else "radio poll only"
    print(f"  t={t:6.0f} s  {mark}")
print()
print("every radio poll fetches frames the parent buffered while the device")
print("slept; only every 4th poll also powers the sensor path and starts a")
print("collection round.")
