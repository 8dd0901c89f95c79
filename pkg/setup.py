#!/usr/bin/env python3
"""
Setup script for the retaining wall optimizer
"""

import subprocess
import sys
from pathlib import Path

def run_command(command, description):
    """Run a command and handle errors"""
    print(f"🔄 {description}...")
    try:
        subprocess.run(command, shell=True, check=True, capture_output=True, text=True)
        print(f"✅ {description} completed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ {description} failed: {e}")
        if e.stdout:
            print(f"STDOUT: {e.stdout}")
        if e.stderr:
            print(f"STDERR: {e.stderr}")
        return False

def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 9):
        print("❌ Python 3.9 or higher is required")
        return False
    print(f"✅ Python {sys.version_info.major}.{sys.version_info.minor} detected")
    return True

def create_directories():
    """Create necessary directories"""
    for dir_name in ['results', 'logs']:
        Path(dir_name).mkdir(exist_ok=True)
    print("✅ Created necessary directories")

def check_env_file():
    """Copy .env.example to .env when no .env exists yet"""
    env_file = Path('.env')
    if env_file.exists():
        print("✅ Environment file found")
        return True

    example = Path('.env.example')
    if not example.exists():
        print("⚠️  No .env or .env.example; built-in defaults will be used")
        return True
    env_file.write_text(example.read_text())
    print("✅ Created .env from .env.example")
    return True

def main():
    """Main setup function"""
    print("🚀 Setting up the retaining wall optimizer...")
    print("=" * 50)

    if not check_python_version():
        return False

    if not run_command("pip install -r requirements.txt", "Installing dependencies"):
        return False

    create_directories()
    check_env_file()

    if not run_command("python -m wallopt.harness_cli catalog", "Building the rebar catalog"):
        return False

    print("\n🎉 Setup completed successfully!")
    print("\n🚀 To run a desk-scale experiment:")
    print("   python -m wallopt.harness_cli run --example 1 --case 1 --profile ci")
    print("\n🧪 To run the tests:")
    print("   pytest tests/")

    return True

if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
