"""Regenerates the worked frame examples shown in docs/protocol.md."""

from wsn_pathosim import (ErrorReason, MessageFrame, MessageKind, SensorKind,
                          encode_frame, err_payload, sample_resp_payload,
                          set_period_payload)

cases = [
    ("AWAKE, node 3 to coordinator, seq 1",
     MessageFrame(MessageKind.AWAKE, 3, 0, 1)),
    ("SAMPLE_REQ, coordinator to node 3, seq 2",
     MessageFrame(MessageKind.SAMPLE_REQ, 0, 3, 2)),
    ("SAMPLE_RESP, displacement 1.25 sampled at tick 112000640",
     MessageFrame(MessageKind.SAMPLE_RESP, 3, 0, 3,
                  sample_resp_payload(SensorKind.DISPLACEMENT, 1.25, 112000640))),
    ("SET_PERIOD to 3600 s, coordinator to node 3, seq 4",
     MessageFrame(MessageKind.SET_PERIOD, 0, 3, 4, set_period_payload(3600))),
    ("ERR GaugeNotHeated, node 3 to coordinator, seq 5",
     MessageFrame(MessageKind.ERR, 3, 0, 5,
                  err_payload(ErrorReason.GAUGE_NOT_HEATED))),
]

for label, frame in cases:
    data = encode_frame(frame)
    print(f"{label} ({len(data)} B)")
    print(f"  {data.hex(' ')}")
    print()
