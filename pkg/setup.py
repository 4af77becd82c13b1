import sys

from setuptools import setup

sys.path.insert(0, "descent_calculus")
from lib import __generate_git_descent_calculus_version  # noqa: E402


def main():
    package_base = "descent_calculus"

    # List the packages and their dir mapping:
    # "install_destination_package_path": "source_dir_path"
    package_dir_map = {
        f"{package_base}": "descent_calculus",
        f"{package_base}.commands": "descent_calculus/commands",
        f"{package_base}.lib": "descent_calculus/lib",
        f"{package_base}.test": "descent_calculus/test",
        f"{package_base}.tools": "descent_calculus/tools",
    }

    packages = list(package_dir_map)

    descent_calculus_version = __generate_git_descent_calculus_version()
    with open("./descent_calculus/lib/_version.py", "w") as version_out:
        version_out.write(f"__descent_calculus_version='{descent_calculus_version}'")

    setup(
        name="descent-calculus",
        version=descent_calculus_version,
        python_requires=">=3.8",
        packages=packages,
        package_dir=package_dir_map,
        package_data={f"{package_base}": ["examples/configs/*.json"]},
        install_requires=["gitpython", "networkx", "numpy"],
        extras_require={"test": ["hypothesis"]},
        entry_points={
            "console_scripts": [
                "descent-calculus = descent_calculus.tools.run_descent:main",
            ]
        },
    )


if __name__ == "__main__":
    main()
