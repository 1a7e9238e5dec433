"""
PCA vs sparse PCA features for classification
=============================================

A synthetic stand-in for the face data: 15 classes, 8 training and 3 test
samples each, class means supported on a handful of coordinates. The grid
runs every (method, d, classifier) cell and prints the two accuracy tables.

To use real images instead, point the config at two directories of
``<label>_<name>.pgm`` files (``source="pgm"``) or at CSV files.
"""

from hamspca.bench import ExperimentConfig, report_to_markdown, run_pipeline

config = ExperimentConfig(
    seed=42,
    synth_d=256,
    synth_sigma=0.6,
    dims=(10, 20),
    max_iter=2000,
    record_time=True,
)
report = run_pipeline(config)
print(report_to_markdown(report))

# %%
for row in report.rows:
    print(f"{row.method:9s} d={row.d:<3d} {row.classifier}  Q={row.accuracy:.3f}  {row.seconds:.2f}s")
